// Synthetic test fixtures: parameterized daily load shapes, a PV capacity
// factor profile, a TOU tariff and an hourly avoided-cost series. These are
// NOT measured building or market data — they are smooth closed-form shapes
// with the right qualitative structure for exercising the engine: a
// morning-and-evening-peaking consumer scaled to a 444 kW maximum, a
// midday-peaking consumer scaled to 358 kW, summer-peaking solar, and
// avoided costs that spike on summer weekday evenings.
#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "nemdv/calendar.hpp"
#include "nemdv/io.hpp"
#include "nemdv/scenario.hpp"
#include "nemdv/time_series.hpp"

namespace nemdv::synth {

enum class ConsumerKind { Mep, Mdp }; // morning/evening-peaking vs midday-peaking

inline const char* to_string(ConsumerKind k) { return k == ConsumerKind::Mep ? "mep" : "mdp"; }

constexpr double kMepPeakKw = 444.0;
constexpr double kMdpPeakKw = 358.0;

namespace detail {
inline double bump(double x, double center, double width) {
    const double z = (x - center) / width;
    return std::exp(-0.5 * z * z);
}
} // namespace detail

// Raw (unscaled) demand shape for one labelled hour.
inline double demand_shape(ConsumerKind kind, const HourLabel& lab) {
    const double h = lab.hour;
    const double m = lab.month;
    double v;
    if (kind == ConsumerKind::Mep) {
        v = 0.42 + 0.30 * detail::bump(h, 7.5, 1.8) + 0.55 * detail::bump(h, 19.5, 2.3);
        v *= 1.0 + 0.12 * detail::bump(m, 7.3, 2.0);             // summer cooling
        if (lab.weekend_or_holiday) v *= 1.04;                    // busier weekends
    } else {
        v = 0.36 + 0.62 * detail::bump(h, 13.0, 3.2) + 0.10 * detail::bump(h, 19.0, 2.0);
        v *= 1.0 + 0.15 * detail::bump(m, 7.3, 2.2);              // refrigeration load
        if (lab.weekend_or_holiday) v *= 1.05;
    }
    v *= 1.0 + 0.02 * std::sin(2.0 * M_PI * lab.day / 9.5);       // day-to-day ripple
    return v;
}

// Hourly demand over `days` days starting at midnight, scaled so the series
// maximum equals peak_kw exactly.
inline TimeSeries demand(ConsumerKind kind, int days, CivilDate start,
                         double peak_kw = -1.0) {
    if (peak_kw < 0.0) peak_kw = kind == ConsumerKind::Mep ? kMepPeakKw : kMdpPeakKw;
    Calendar cal(CivilDateTime{start, 0}, static_cast<std::size_t>(days) * 24);
    TimeSeries d = TimeSeries::constant(0.0, cal.size());
    double raw_max = 0.0;
    for (std::size_t t = 0; t < cal.size(); ++t) {
        d[t] = demand_shape(kind, cal[t]);
        raw_max = std::max(raw_max, d[t]);
    }
    if (raw_max > 0.0)
        for (double& v : d.values) v *= peak_kw / raw_max;
    return d;
}

// Daylight bell with a summer-peaking seasonal amplitude and a mild
// deterministic "cloudiness" ripple; values stay within [0, 0.95].
inline TimeSeries pv_capacity_factor(int days, CivilDate start) {
    Calendar cal(CivilDateTime{start, 0}, static_cast<std::size_t>(days) * 24);
    TimeSeries cf = TimeSeries::constant(0.0, cal.size());
    for (std::size_t t = 0; t < cal.size(); ++t) {
        const auto& lab = cal[t];
        const double x = (lab.hour - 12.6) / 6.2;
        if (std::abs(x) >= 1.0) continue;
        const double elev = std::pow(std::cos(x * M_PI / 2.0), 1.25);
        const double seasonal = 0.60 + 0.35 * std::cos(2.0 * M_PI * (lab.month - 6.5) / 12.0);
        const double ripple = 1.0 - 0.06 * (0.5 + 0.5 * std::sin(2.0 * M_PI * lab.day / 7.3));
        cf[t] = std::min(0.95, std::max(0.0, elev * seasonal * ripple));
    }
    return cf;
}

// Hourly avoided costs: small most of the time, an evening ridge on summer
// weekdays that clears the retail peak price, and extreme September spikes.
// A deterministic day-to-day swing leaves the per-bucket averaging with real
// work to do.
inline TimeSeries avoided_costs(int days, CivilDate start) {
    Calendar cal(CivilDateTime{start, 0}, static_cast<std::size_t>(days) * 24);
    TimeSeries acc = TimeSeries::constant(0.0, cal.size());
    for (std::size_t t = 0; t < cal.size(); ++t) {
        const auto& lab = cal[t];
        double v = 0.018 + 0.012 * detail::bump(lab.hour, 19.0, 3.0) +
                   0.006 * detail::bump(lab.hour, 8.0, 2.2);
        v *= 1.0 + 0.25 * detail::bump(lab.month, 8.0, 1.5);
        if (!lab.weekend_or_holiday && lab.month >= 6 && lab.month <= 9 &&
            (lab.hour == 18 || lab.hour == 19)) {
            v += 0.55;
            if (lab.month == 9 && lab.hour == 19) v += 2.35; // scarcity pricing
        }
        v *= 1.0 + 0.22 * std::sin(2.0 * M_PI * lab.day / 5.7);
        acc[t] = v;
    }
    return acc;
}

// A commercial TOU tariff in the engine's JSON schema: summer/winter energy
// prices with a weekday evening peak, an anytime demand charge and summer
// peak/part-peak demand charges. Values are synthetic but sized like a large
// commercial rate.
inline nlohmann::json tariff_json() {
    using nlohmann::json;
    const json summer_months = {6, 7, 8, 9};
    const json winter_months = {1, 2, 3, 4, 5, 10, 11, 12};
    const json peak_hours = {16, 17, 18, 19, 20};
    const json part_hours = {8, 9, 10, 11, 12, 13, 14, 15, 21};
    const json night_hours = {0, 1, 2, 3, 4, 5, 6, 7, 22, 23};
    json j;
    j["name"] = "synthetic-b19-like";
    j["energy_periods"] = json::array({
        {{"name", "summer_peak"}, {"months", summer_months}, {"day_types", {"weekday"}},
         {"hours", peak_hours}, {"price", 0.21585}},
        {{"name", "summer_part_peak"}, {"months", summer_months}, {"day_types", {"weekday"}},
         {"hours", part_hours}, {"price", 0.16238}},
        {{"name", "summer_off_peak_wd"}, {"months", summer_months}, {"day_types", {"weekday"}},
         {"hours", night_hours}, {"price", 0.12012}},
        {{"name", "summer_off_peak_we"}, {"months", summer_months}, {"day_types", {"weekend"}},
         {"price", 0.12012}},
        {{"name", "winter_peak"}, {"months", winter_months}, {"day_types", {"weekday"}},
         {"hours", peak_hours}, {"price", 0.16902}},
        {{"name", "winter_off_peak_wd"}, {"months", winter_months}, {"day_types", {"weekday"}},
         {"hours", json::array({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 21, 22,
                                23})},
         {"price", 0.11328}},
        {{"name", "winter_off_peak_we"}, {"months", winter_months}, {"day_types", {"weekend"}},
         {"price", 0.11328}},
    });
    j["demand_charges"] = json::array({
        {{"name", "anytime"}, {"price", 18.41}},
        {{"name", "summer_peak"}, {"months", summer_months}, {"day_types", {"weekday"}},
         {"hours", peak_hours}, {"price", 21.23}},
        {{"name", "summer_part_peak"}, {"months", summer_months}, {"day_types", {"weekday"}},
         {"hours", part_hours}, {"price", 5.18}},
    });
    return j;
}

inline Tariff tariff(const Calendar& cal) {
    return parse_tariff(tariff_json(), cal, "synthetic tariff");
}

// Writes a complete fixture directory: profiles, tariff and a scenario file
// wired together, ready for the CLI. Returns the scenario file path.
inline std::string write_fixture(const std::string& dir, ConsumerKind kind, int days,
                                 CivilDate start) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write_series = [&](const std::string& name, const TimeSeries& ts) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw IoError((fs::path(dir) / name).string() + ": cannot open for writing");
        out << "hour,value\n";
        for (std::size_t t = 0; t < ts.size(); ++t)
            out << t << ',' << nemdv::detail::fmt_g(ts[t], 17) << '\n';
    };
    write_series("demand.csv", demand(kind, days, start));
    write_series("pv_cf.csv", pv_capacity_factor(days, start));
    write_series("acc.csv", avoided_costs(days, start));
    {
        std::ofstream out(fs::path(dir) / "tariff.json", std::ios::binary);
        out << tariff_json().dump(2) << '\n';
    }
    char datebuf[16];
    std::snprintf(datebuf, sizeof(datebuf), "%04d-%02d-%02d", start.year, start.month,
                  start.day);
    const double maxd = kind == ConsumerKind::Mep ? kMepPeakKw : kMdpPeakKw;
    nlohmann::json sj;
    sj["name"] = std::string("synthetic-") + to_string(kind);
    sj["start_date"] = datebuf;
    sj["profiles"] = {{"demand", "demand.csv"}, {"pv_cf", "pv_cf.csv"}, {"acc", "acc.csv"}};
    sj["tariff"] = "tariff.json";
    sj["pv"] = {{"rated_kw", maxd}, {"inverter_efficiency", 0.96}};
    sj["bes"] = {{"power_kw", 0.5 * maxd},  {"duration_h", 2.0},
                 {"round_trip_efficiency", 0.86}, {"scheme", "grid_charge_no_export"}};
    sj["flex"] = {{"fraction", 0.2}, {"recovery_hours", 6}};
    sj["policy"] = {{"variant", "nem2"}, {"nbc", kDefaultNonBypassableCharge}};
    sj["sweep"] = {{"pv_ratio", {1.0}},
                   {"bes_power_ratio", {0.5}},
                   {"bes_duration_hours", {2.0}},
                   {"schemes", {"grid_charge_no_export", "grid_charge_with_export"}},
                   {"policies", {"nem2"}},
                   {"baseline", "pv_only_no_nem"}};
    const std::string spath = (fs::path(dir) / "scenario.json").string();
    {
        std::ofstream out(spath, std::ios::binary);
        out << sj.dump(2) << '\n';
    }
    return spath;
}

// Assembled scenario over `days` days from `start`, PV sized to the
// consumer's maximum demand.
inline Scenario scenario(ConsumerKind kind, int days, CivilDate start, NemPolicy policy,
                         double pv_ratio = 1.0) {
    Scenario s;
    s.name = std::string("synthetic-") + to_string(kind);
    s.demand = demand(kind, days, start);
    s.pv_cf = pv_capacity_factor(days, start);
    s.calendar = Calendar(CivilDateTime{start, 0}, s.demand.size());
    s.tariff = tariff(s.calendar);
    s.pv.rated_kw = pv_ratio * s.demand.max_value();
    s.pv.inverter_efficiency = 0.96;
    if (policy.variant == NemVariant::Nem3 && policy.acc_hourly.empty())
        policy.acc_hourly = avoided_costs(days, start);
    s.policy = std::move(policy);
    return s;
}

} // namespace nemdv::synth
