// Minimal stderr logger. Level comes from the NEMDV_LOG environment
// variable: error, warn, info, debug (default warn).
#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace nemdv {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

inline LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("NEMDV_LOG");
        if (env == nullptr) return LogLevel::Warn;
        if (std::strcmp(env, "error") == 0) return LogLevel::Error;
        if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
        if (std::strcmp(env, "info") == 0) return LogLevel::Info;
        if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
        return LogLevel::Warn;
    }();
    return level;
}

inline void log_msg(LogLevel level, const std::string& msg) {
    if (level > log_level()) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::fprintf(stderr, "[nemdv %s] %s\n", names[static_cast<int>(level)], msg.c_str());
}

inline void log_error(const std::string& msg) { log_msg(LogLevel::Error, msg); }
inline void log_warn(const std::string& msg) { log_msg(LogLevel::Warn, msg); }
inline void log_info(const std::string& msg) { log_msg(LogLevel::Info, msg); }
inline void log_debug(const std::string& msg) { log_msg(LogLevel::Debug, msg); }

} // namespace nemdv
