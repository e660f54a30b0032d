// File ingestion and result serialization.
//
// Profiles are CSV with header `hour,value`; the hour column is either a
// dense 0-based index or an ISO-8601 timestamp on an hour boundary. Tariffs
// and scenarios are JSON. Sweep results go out as CSV with a pinned column
// order and %.6g floats; dispatch dumps use round-trip precision so they can
// be audited at tight tolerances.
#pragma once

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nemdv/calendar.hpp"
#include "nemdv/log.hpp"
#include "nemdv/scenario.hpp"
#include "nemdv/sweep.hpp"

namespace nemdv {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt_g(double v, int digits) {
    if (v == 0.0) return "0";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s, const std::string& file, int line_no) {
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0') || errno == ERANGE)
        throw IoError(file + ":" + std::to_string(line_no) + ": cannot parse number '" + s + "'");
    if (!std::isfinite(v))
        throw IoError(file + ":" + std::to_string(line_no) + ": non-finite value '" + s + "'");
    return v;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace detail

struct ProfileData {
    TimeSeries series;
    std::optional<CivilDateTime> start; // present when the hour column held timestamps
};

inline ProfileData load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open file");
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw IoError(path + ":1: empty file");
    ++line_no;
    {
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 2 || detail::trim(fields[0]) != "hour" ||
            detail::trim(fields[1]) != "value")
            throw IoError(path + ":1: bad header, expected 'hour,value'");
    }

    ProfileData out;
    std::optional<std::int64_t> prev_abs; // absolute hour when timestamps are used
    long expected_index = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 2)
            throw IoError(path + ":" + std::to_string(line_no) + ": expected 2 columns, got " +
                          std::to_string(fields.size()));
        const std::string hour_field = detail::trim(fields[0]);
        const bool is_timestamp = hour_field.find('-') != std::string::npos;
        if (is_timestamp) {
            CivilDateTime ts;
            try {
                ts = parse_civil_datetime(hour_field);
            } catch (const std::exception& e) {
                throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
            }
            const std::int64_t abs_hour = days_from_civil(ts.date) * 24 + ts.hour;
            if (!out.start.has_value()) {
                out.start = ts;
            } else if (prev_abs && abs_hour == *prev_abs) {
                throw IoError(path + ":" + std::to_string(line_no) + ": duplicate hour '" +
                              hour_field + "'");
            } else if (prev_abs && abs_hour != *prev_abs + 1) {
                throw IoError(path + ":" + std::to_string(line_no) + ": gap before '" +
                              hour_field + "' (hours must be consecutive)");
            }
            prev_abs = abs_hour;
        } else {
            long idx = 0;
            try {
                std::size_t used = 0;
                idx = std::stol(hour_field, &used);
                if (used != hour_field.size()) throw std::invalid_argument(hour_field);
            } catch (const std::exception&) {
                throw IoError(path + ":" + std::to_string(line_no) + ": bad hour '" +
                              hour_field + "'");
            }
            if (idx < expected_index)
                throw IoError(path + ":" + std::to_string(line_no) + ": duplicate hour " +
                              std::to_string(idx));
            if (idx > expected_index)
                throw IoError(path + ":" + std::to_string(line_no) + ": gap, missing hour " +
                              std::to_string(expected_index));
            ++expected_index;
        }
        out.series.values.push_back(detail::parse_double(fields[1], path, line_no));
    }
    if (out.series.empty()) throw IoError(path + ": no data rows");
    return out;
}

// ---- tariff files ----

namespace detail {

struct TouSelector {
    std::vector<int> months;    // empty = all
    std::vector<int> hours;     // empty = all
    bool weekday = true;        // which day types the selector covers
    bool weekend = true;

    bool matches(const HourLabel& lab) const {
        if (!months.empty() &&
            std::find(months.begin(), months.end(), lab.month) == months.end())
            return false;
        if (!hours.empty() && std::find(hours.begin(), hours.end(), lab.hour) == hours.end())
            return false;
        return lab.weekend_or_holiday ? weekend : weekday;
    }
};

struct TouPeriod {
    std::string name;
    double price = 0.0;
    TouSelector sel;
};

inline TouPeriod parse_tou_period(const nlohmann::json& j, const std::string& file) {
    TouPeriod p;
    if (!j.contains("price"))
        throw IoError(file + ": tariff period missing 'price'");
    p.name = j.value("name", "");
    p.price = j.at("price").get<double>();
    if (j.contains("months")) p.sel.months = j.at("months").get<std::vector<int>>();
    if (j.contains("hours")) p.sel.hours = j.at("hours").get<std::vector<int>>();
    if (j.contains("day_types")) {
        p.sel.weekday = false;
        p.sel.weekend = false;
        for (const auto& d : j.at("day_types")) {
            const std::string s = d.get<std::string>();
            if (s == "weekday")
                p.sel.weekday = true;
            else if (s == "weekend")
                p.sel.weekend = true;
            else
                throw IoError(file + ": unknown day_type '" + s +
                              "' (expected 'weekday' or 'weekend')");
        }
    }
    return p;
}

} // namespace detail

// Materializes a tariff against the horizon calendar. Every hour must fall
// in exactly one energy period; demand-charge masks may overlap.
inline Tariff parse_tariff(const nlohmann::json& j, const Calendar& cal,
                           const std::string& path) {
    if (!j.contains("energy_periods") || !j.at("energy_periods").is_array() ||
        j.at("energy_periods").empty())
        throw IoError(path + ": missing non-empty 'energy_periods' array");

    std::vector<detail::TouPeriod> energy;
    for (const auto& pj : j.at("energy_periods")) energy.push_back(detail::parse_tou_period(pj, path));
    std::vector<detail::TouPeriod> charges;
    if (j.contains("demand_charges"))
        for (const auto& pj : j.at("demand_charges"))
            charges.push_back(detail::parse_tou_period(pj, path));

    Tariff tariff;
    tariff.energy_price = TimeSeries::constant(0.0, cal.size());
    for (std::size_t t = 0; t < cal.size(); ++t) {
        int matches = 0;
        for (const auto& p : energy) {
            if (p.sel.matches(cal[t])) {
                tariff.energy_price[t] = p.price;
                ++matches;
            }
        }
        if (matches != 1)
            throw IoError(path + ": hour " + std::to_string(t) + " (" +
                          std::to_string(cal[t].year) + "-" + std::to_string(cal[t].month) +
                          "-" + std::to_string(cal[t].day) + "T" + std::to_string(cal[t].hour) +
                          ") covered by " + std::to_string(matches) +
                          " energy periods, expected exactly 1");
    }
    for (const auto& p : charges) {
        DemandChargePeriod period;
        period.name = p.name.empty() ? ("period" + std::to_string(tariff.demand_periods.size()))
                                     : p.name;
        period.price = p.price;
        period.mask.resize(cal.size());
        for (std::size_t t = 0; t < cal.size(); ++t)
            period.mask[t] = p.sel.matches(cal[t]) ? 1 : 0;
        tariff.demand_periods.push_back(std::move(period));
    }
    return tariff;
}

inline Tariff load_tariff(const std::string& path, const Calendar& cal) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open file");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    return parse_tariff(j, cal, path);
}

// ---- scenario files ----

struct ScenarioBundle {
    Scenario scenario;
    std::optional<SweepConfig> sweep;
    std::optional<TimeSeries> acc; // present whenever profiles.acc was given
};

namespace detail {

inline std::string resolve_path(const std::string& base_file, const std::string& rel) {
    std::filesystem::path p(rel);
    if (p.is_absolute()) return rel;
    return (std::filesystem::path(base_file).parent_path() / p).string();
}

inline SweepConfig parse_sweep(const nlohmann::json& j, const std::string& file,
                               const std::optional<TimeSeries>& acc, double base_nbc) {
    SweepConfig cfg;
    cfg.nem2_nbc = base_nbc;
    cfg.acc_hourly = acc;
    if (j.contains("pv_ratio")) cfg.pv_ratio = j.at("pv_ratio").get<std::vector<double>>();
    if (j.contains("bes_power_ratio"))
        cfg.bes_power_ratio = j.at("bes_power_ratio").get<std::vector<double>>();
    if (j.contains("bes_duration_hours"))
        cfg.bes_duration_hours = j.at("bes_duration_hours").get<std::vector<double>>();
    if (j.contains("schemes")) {
        for (const auto& sj : j.at("schemes")) {
            auto s = bes_scheme_from_string(sj.get<std::string>());
            if (!s) throw IoError(file + ": unknown scheme '" + sj.get<std::string>() + "'");
            cfg.schemes.push_back(*s);
        }
    }
    if (j.contains("flex_fraction"))
        cfg.flex_fraction = j.at("flex_fraction").get<std::vector<double>>();
    if (j.contains("recovery_hours"))
        cfg.recovery_hours = j.at("recovery_hours").get<std::vector<int>>();
    if (j.contains("policies")) {
        for (const auto& pj : j.at("policies")) {
            auto v = nem_variant_from_string(pj.get<std::string>());
            if (!v) throw IoError(file + ": unknown policy '" + pj.get<std::string>() + "'");
            cfg.policies.push_back(*v);
        }
    }
    if (j.contains("baseline")) {
        auto b = baseline_rule_from_string(j.at("baseline").get<std::string>());
        if (!b)
            throw IoError(file + ": unknown baseline rule '" +
                          j.at("baseline").get<std::string>() + "'");
        cfg.baseline = *b;
    }
    if (j.contains("bes_rte")) cfg.bes_rte = j.at("bes_rte").get<double>();
    if (j.contains("nem2_nbc")) cfg.nem2_nbc = j.at("nem2_nbc").get<double>();
    for (NemVariant v : cfg.policies)
        if (v == NemVariant::Nem3 && !cfg.acc_hourly.has_value())
            throw IoError(file + ": sweep includes nem3 but no 'profiles.acc' is configured");
    return cfg;
}

} // namespace detail

inline ScenarioBundle load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open file");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw IoError(path + ": " + e.what());
    }

    ScenarioBundle bundle;
    Scenario& s = bundle.scenario;
    s.name = j.value("name", std::filesystem::path(path).stem().string());

    if (!j.contains("profiles") || !j.at("profiles").contains("demand") ||
        !j.at("profiles").contains("pv_cf"))
        throw IoError(path + ": 'profiles' must name at least 'demand' and 'pv_cf' files");
    const auto& profiles = j.at("profiles");
    ProfileData demand =
        load_profile(detail::resolve_path(path, profiles.at("demand").get<std::string>()));
    ProfileData pv_cf =
        load_profile(detail::resolve_path(path, profiles.at("pv_cf").get<std::string>()));
    std::optional<ProfileData> acc;
    if (profiles.contains("acc"))
        acc = load_profile(detail::resolve_path(path, profiles.at("acc").get<std::string>()));

    auto same_start = [](const ProfileData& a, const ProfileData& b) {
        if (!a.start || !b.start) return true;
        return days_from_civil(a.start->date) * 24 + a.start->hour ==
               days_from_civil(b.start->date) * 24 + b.start->hour;
    };
    if (!same_start(demand, pv_cf) || (acc && !same_start(demand, *acc)))
        throw IoError(path + ": profile timestamps do not start at the same hour");

    s.demand = demand.series;
    s.pv_cf = pv_cf.series;

    CivilDateTime start{CivilDate{2021, 1, 1}, 0};
    if (demand.start.has_value())
        start = *demand.start;
    else if (j.contains("start_date"))
        start = CivilDateTime{parse_civil_date(j.at("start_date").get<std::string>()), 0};
    else
        log_info(path + ": no start_date and no timestamps; assuming 2021-01-01");

    std::set<CivilDate> holidays;
    if (j.contains("holidays"))
        for (const auto& h : j.at("holidays"))
            holidays.insert(parse_civil_date(h.get<std::string>()));
    s.calendar = Calendar(start, s.demand.size(), holidays);

    if (!j.contains("tariff")) throw IoError(path + ": missing 'tariff' file reference");
    s.tariff = load_tariff(detail::resolve_path(path, j.at("tariff").get<std::string>()),
                           s.calendar);

    double nbc = kDefaultNonBypassableCharge;
    if (j.contains("policy")) {
        const auto& pj = j.at("policy");
        const std::string variant = pj.value("variant", "no_nem");
        auto v = nem_variant_from_string(variant);
        if (!v) throw IoError(path + ": unknown policy variant '" + variant + "'");
        nbc = pj.value("nbc", kDefaultNonBypassableCharge);
        switch (*v) {
            case NemVariant::NoNem: s.policy = NemPolicy::no_nem(); break;
            case NemVariant::Nem1: s.policy = NemPolicy::nem1(); break;
            case NemVariant::Nem2: s.policy = NemPolicy::nem2(nbc); break;
            case NemVariant::Nem3:
                if (!acc.has_value())
                    throw IoError(path + ": policy nem3 requires a 'profiles.acc' series");
                s.policy = NemPolicy::nem3(acc->series);
                break;
        }
    } else {
        s.policy = NemPolicy::no_nem();
    }

    if (j.contains("pv")) {
        const auto& pj = j.at("pv");
        s.pv.rated_kw = pj.value("rated_kw", 0.0);
        s.pv.inverter_efficiency = pj.value("inverter_efficiency", 1.0);
    } else if (s.policy.variant != NemVariant::NoNem) {
        throw IoError(path + ": a 'pv' block is required under any NEM policy");
    }

    if (j.contains("bes")) {
        const auto& bj = j.at("bes");
        BesSpec b;
        b.power_kw = bj.value("power_kw", 0.0);
        b.duration_h = bj.value("duration_h", 0.0);
        b.round_trip_efficiency = bj.value("round_trip_efficiency", 0.86);
        const std::string scheme = bj.value("scheme", "grid_charge_no_export");
        auto sch = bes_scheme_from_string(scheme);
        if (!sch) throw IoError(path + ": unknown bes scheme '" + scheme + "'");
        b.scheme = *sch;
        b.soc_min_kwh = bj.value("soc_min_kwh", 0.0);
        b.soc_init_kwh = bj.value("soc_init_kwh", 0.5 * b.soc_max_kwh());
        s.bes = b;
    }

    if (j.contains("flex")) {
        const auto& fj = j.at("flex");
        FlexSpec f;
        f.fraction = fj.value("fraction", 0.0);
        f.recovery_hours = fj.value("recovery_hours", 1);
        s.flex = f;
    }

    if (acc.has_value()) bundle.acc = acc->series;
    if (j.contains("sweep"))
        bundle.sweep = detail::parse_sweep(j.at("sweep"), path, bundle.acc, nbc);
    return bundle;
}

// ---- result CSV ----

inline std::string result_csv_header() {
    return "pv_ratio,bes_power_ratio,bes_duration_h,scheme,flex_fraction,recovery_h,policy,"
           "demand_charge,energy_charge,export_revenue,net_bill,relative_bill,status,wall_ms";
}

inline std::string result_csv_line(const ResultRow& r) {
    std::ostringstream os;
    os << detail::fmt_g(r.point.pv_ratio, 6) << ',' << detail::fmt_g(r.point.bes_power_ratio, 6)
       << ',' << detail::fmt_g(r.point.bes_duration_h, 6) << ',' << to_string(r.point.scheme)
       << ',' << detail::fmt_g(r.point.flex_fraction, 6) << ',' << r.point.recovery_h << ','
       << to_string(r.point.policy) << ',' << detail::fmt_g(r.bill.demand_charge_total, 6)
       << ',' << detail::fmt_g(r.bill.energy_charge_total, 6) << ','
       << detail::fmt_g(r.bill.export_revenue, 6) << ',' << detail::fmt_g(r.bill.net_bill, 6)
       << ',' << (r.relative_bill.has_value() ? detail::fmt_g(*r.relative_bill, 6) : "undefined")
       << ',' << to_string(r.status) << ',' << detail::fmt_g(r.wall_ms, 6);
    return os.str();
}

inline void write_results(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << result_csv_header() << '\n';
    for (const auto& r : rows) out << result_csv_line(r) << '\n';
    if (!out) throw IoError(path + ": write failed");
}

// ---- dispatch CSV (round-trip precision, auditable) ----

inline const char* dispatch_csv_header() {
    return "hour,demand_kw,net_demand_kw,pv_btm_kw,pv_export_kw,bes_charge_kw,"
           "bes_discharge_btm_kw,bes_discharge_export_kw,flex_up_kw,flex_down_kw,soc_kwh";
}

inline void write_dispatch(const DispatchSolution& d, const Scenario& s,
                           const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << dispatch_csv_header() << '\n';
    for (std::size_t t = 0; t < d.horizon(); ++t) {
        out << t << ',' << detail::fmt_g(s.demand[t], 17) << ','
            << detail::fmt_g(d.net_demand[t], 17) << ',' << detail::fmt_g(d.pv_btm[t], 17) << ','
            << detail::fmt_g(d.pv_export[t], 17) << ',' << detail::fmt_g(d.bes_charge[t], 17)
            << ',' << detail::fmt_g(d.bes_discharge_btm[t], 17) << ','
            << detail::fmt_g(d.bes_discharge_exp[t], 17) << ','
            << detail::fmt_g(d.flex_up[t], 17) << ',' << detail::fmt_g(d.flex_down[t], 17) << ','
            << detail::fmt_g(d.soc[t], 17) << '\n';
    }
    if (!out) throw IoError(path + ": write failed");
}

// Reads a dispatch dump back for auditing. Period maxima are not stored in
// the file; the caller re-derives them from the net-demand column.
inline DispatchSolution read_dispatch(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open file");
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw IoError(path + ":1: empty file");
    ++line_no;
    if (detail::trim(line) != dispatch_csv_header())
        throw IoError(path + ":1: bad dispatch header");
    DispatchSolution d;
    d.status = SolveStatus::Optimal;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto f = detail::split_csv_line(line);
        if (f.size() != 11)
            throw IoError(path + ":" + std::to_string(line_no) + ": expected 11 columns");
        auto num = [&](int i) { return detail::parse_double(f[i], path, line_no); };
        d.net_demand.push_back(num(2));
        d.pv_btm.push_back(num(3));
        d.pv_export.push_back(num(4));
        d.bes_charge.push_back(num(5));
        d.bes_discharge_btm.push_back(num(6));
        d.bes_discharge_exp.push_back(num(7));
        d.flex_up.push_back(num(8));
        d.flex_down.push_back(num(9));
        d.soc.push_back(num(10));
    }
    if (d.net_demand.empty()) throw IoError(path + ": no data rows");
    return d;
}

// ---- export price CSV ----

inline void write_price_series(const Tariff& tariff, const Calendar& cal,
                               const std::optional<TimeSeries>& acc, double nbc,
                               std::ostream& out) {
    const TimeSeries nem1 = build_export_prices(NemPolicy::nem1(), tariff, cal);
    const TimeSeries nem2 = build_export_prices(NemPolicy::nem2(nbc), tariff, cal);
    std::optional<TimeSeries> nem3;
    if (acc.has_value())
        nem3 = build_export_prices(NemPolicy::nem3(*acc), tariff, cal);
    out << "hour,energy_price,no_nem,nem1,nem2" << (nem3 ? ",nem3" : "") << '\n';
    for (std::size_t t = 0; t < tariff.horizon(); ++t) {
        out << t << ',' << detail::fmt_g(tariff.energy_price[t], 17) << ",0,"
            << detail::fmt_g(nem1[t], 17) << ',' << detail::fmt_g(nem2[t], 17);
        if (nem3) out << ',' << detail::fmt_g((*nem3)[t], 17);
        out << '\n';
    }
}

} // namespace nemdv
