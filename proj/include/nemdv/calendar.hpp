// Civil-date arithmetic and per-hour calendar labels (month, day type,
// hour of day) used for tariff materialization and export-price averaging.
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace nemdv {

struct CivilDate {
    int year = 1970;
    int month = 1; // 1..12
    int day = 1;   // 1..31

    friend bool operator==(const CivilDate&, const CivilDate&) = default;
    friend auto operator<=>(const CivilDate&, const CivilDate&) = default;
};

struct CivilDateTime {
    CivilDate date;
    int hour = 0; // 0..23
};

// Days since 1970-01-01 for a proleptic Gregorian date.
inline std::int64_t days_from_civil(const CivilDate& d) {
    std::int64_t y = d.year;
    y -= d.month <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (d.month + (d.month > 2 ? -3 : 9)) + 2u) / 5u + d.day - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

// 0 = Sunday .. 6 = Saturday.
inline int weekday_of(const CivilDate& d) {
    std::int64_t z = days_from_civil(d);
    return static_cast<int>(((z % 7) + 11) % 7); // 1970-01-01 was a Thursday
}

inline bool is_leap_year(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

inline int days_in_month(int year, int month) {
    static const int lens[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap_year(year)) return 29;
    return lens[month - 1];
}

// Parses "YYYY-MM-DD"; throws std::invalid_argument on malformed input.
inline CivilDate parse_civil_date(const std::string& s) {
    auto bad = [&] { throw std::invalid_argument("bad date '" + s + "', expected YYYY-MM-DD"); };
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') bad();
    for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
        if (s[i] < '0' || s[i] > '9') bad();
    CivilDate d;
    d.year = std::stoi(s.substr(0, 4));
    d.month = std::stoi(s.substr(5, 2));
    d.day = std::stoi(s.substr(8, 2));
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) bad();
    return d;
}

// Parses "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS]" or "YYYY-MM-DD HH:MM[:SS]".
inline CivilDateTime parse_civil_datetime(const std::string& s) {
    CivilDateTime dt;
    dt.date = parse_civil_date(s.substr(0, 10));
    if (s.size() == 10) return dt;
    if (s.size() < 16 || (s[10] != 'T' && s[10] != ' ') || s[13] != ':')
        throw std::invalid_argument("bad timestamp '" + s + "'");
    dt.hour = std::stoi(s.substr(11, 2));
    int minute = std::stoi(s.substr(14, 2));
    if (dt.hour < 0 || dt.hour > 23 || minute != 0)
        throw std::invalid_argument("timestamp '" + s + "' is not on an hour boundary");
    return dt;
}

// Labels for one horizon hour.
struct HourLabel {
    int year = 1970;
    int month = 1;      // 1..12
    int day = 1;        // 1..31
    int hour = 0;       // 0..23
    int weekday = 0;    // 0 = Sunday .. 6 = Saturday
    bool weekend_or_holiday = false;
};

class Calendar {
public:
    Calendar() = default;

    Calendar(CivilDateTime start, std::size_t horizon, const std::set<CivilDate>& holidays = {}) {
        labels_.reserve(horizon);
        std::int64_t day_index = days_from_civil(start.date);
        int hour = start.hour;
        CivilDate date = start.date;
        int wd = weekday_of(date);
        bool holiday = holidays.count(date) > 0;
        for (std::size_t t = 0; t < horizon; ++t) {
            HourLabel lab;
            lab.year = date.year;
            lab.month = date.month;
            lab.day = date.day;
            lab.hour = hour;
            lab.weekday = wd;
            lab.weekend_or_holiday = (wd == 0 || wd == 6) || holiday;
            labels_.push_back(lab);
            if (++hour == 24) {
                hour = 0;
                ++day_index;
                date = civil_from_days(day_index);
                wd = weekday_of(date);
                holiday = holidays.count(date) > 0;
            }
        }
    }

    std::size_t size() const { return labels_.size(); }
    const HourLabel& operator[](std::size_t t) const { return labels_[t]; }
    const std::vector<HourLabel>& labels() const { return labels_; }

    // Half-open [begin, end) ranges of hours sharing one (year, month).
    std::vector<std::pair<std::size_t, std::size_t>> month_segments() const {
        std::vector<std::pair<std::size_t, std::size_t>> segs;
        std::size_t begin = 0;
        for (std::size_t t = 1; t <= labels_.size(); ++t) {
            if (t == labels_.size() || labels_[t].year != labels_[begin].year ||
                labels_[t].month != labels_[begin].month) {
                segs.emplace_back(begin, t);
                begin = t;
            }
        }
        return segs;
    }

    Calendar slice(std::size_t begin, std::size_t end) const {
        Calendar c;
        c.labels_.assign(labels_.begin() + begin, labels_.begin() + end);
        return c;
    }

private:
    std::vector<HourLabel> labels_;
};

} // namespace nemdv
