// A Scenario bundles one consumer profile, asset mix, tariff and NEM policy.
// validate_scenario returns human-readable findings instead of throwing so
// batch runners can collect every problem at once.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nemdv/assets.hpp"
#include "nemdv/calendar.hpp"
#include "nemdv/policy.hpp"
#include "nemdv/tariff.hpp"
#include "nemdv/time_series.hpp"

namespace nemdv {

struct Scenario {
    std::string name;
    TimeSeries demand;   // kW
    TimeSeries pv_cf;    // capacity factors in [0, 1]
    PvSpec pv;
    std::optional<BesSpec> bes;
    std::optional<FlexSpec> flex;
    NemPolicy policy;
    Tariff tariff;
    Calendar calendar;

    std::size_t horizon() const { return demand.size(); }

    std::optional<BesScheme> bes_scheme() const {
        if (bes.has_value()) return bes->scheme;
        return std::nullopt;
    }

    Scenario slice(std::size_t begin, std::size_t end) const {
        Scenario s = *this;
        s.demand = demand.slice(begin, end);
        s.pv_cf = pv_cf.slice(begin, end);
        s.tariff = tariff.slice(begin, end);
        s.calendar = calendar.slice(begin, end);
        if (policy.variant == NemVariant::Nem3)
            s.policy.acc_hourly = policy.acc_hourly.slice(begin, end);
        return s;
    }
};

inline std::vector<std::string> validate_scenario(const Scenario& s) {
    std::vector<std::string> v;
    auto idx = [](std::size_t t) { return "[" + std::to_string(t) + "]"; };
    const std::size_t n = s.demand.size();

    if (n == 0) v.push_back("demand: empty series (length must be >= 1)");
    if (!s.demand.all_finite()) v.push_back("demand: non-finite value");
    for (std::size_t t = 0; t < n; ++t)
        if (s.demand[t] < 0.0) {
            v.push_back("demand" + idx(t) + " < 0");
            break;
        }

    if (s.pv_cf.size() != n)
        v.push_back("pv_cf: length mismatch (" + std::to_string(s.pv_cf.size()) +
                    " != " + std::to_string(n) + ")");
    if (!s.pv_cf.all_finite()) v.push_back("pv_cf: non-finite value");
    for (std::size_t t = 0; t < s.pv_cf.size(); ++t) {
        if (s.pv_cf[t] < 0.0) {
            v.push_back("pv_cf" + idx(t) + " < 0");
            break;
        }
        if (s.pv_cf[t] > 1.0) {
            v.push_back("pv_cf" + idx(t) + " > 1");
            break;
        }
    }

    if (s.tariff.energy_price.size() != n)
        v.push_back("tariff.energy_price: length mismatch (" +
                    std::to_string(s.tariff.energy_price.size()) + " != " +
                    std::to_string(n) + ")");
    if (!s.tariff.energy_price.all_finite()) v.push_back("tariff.energy_price: non-finite value");
    for (std::size_t t = 0; t < s.tariff.energy_price.size(); ++t)
        if (s.tariff.energy_price[t] < 0.0) {
            v.push_back("tariff.energy_price" + idx(t) + " < 0");
            break;
        }
    for (const auto& p : s.tariff.demand_periods) {
        if (p.price < 0.0) v.push_back("tariff.demand_periods[" + p.name + "].price < 0");
        if (p.mask.size() != n)
            v.push_back("tariff.demand_periods[" + p.name + "].mask: length mismatch (" +
                        std::to_string(p.mask.size()) + " != " + std::to_string(n) + ")");
    }

    if (s.calendar.size() != n)
        v.push_back("calendar: length mismatch (" + std::to_string(s.calendar.size()) +
                    " != " + std::to_string(n) + ")");

    if (s.pv.rated_kw < 0.0) v.push_back("pv.rated_kw < 0");
    if (!(s.pv.inverter_efficiency > 0.0) || s.pv.inverter_efficiency > 1.0)
        v.push_back("pv.inverter_efficiency outside (0, 1]");

    if (s.bes.has_value()) {
        const BesSpec& b = *s.bes;
        if (b.power_kw < 0.0) v.push_back("bes.power_kw < 0");
        if (b.duration_h < 0.0) v.push_back("bes.duration_h < 0");
        if (!(b.round_trip_efficiency > 0.0) || b.round_trip_efficiency > 1.0)
            v.push_back("bes.round_trip_efficiency outside (0, 1]");
        if (b.soc_min_kwh < 0.0) v.push_back("bes.soc_min_kwh < 0");
        if (b.soc_init_kwh < b.soc_min_kwh)
            v.push_back("bes.soc_init_kwh < bes.soc_min_kwh");
        if (b.soc_init_kwh > b.soc_max_kwh() + 1e-12)
            v.push_back("bes.soc_init_kwh > soc_max (power_kw * duration_h)");
    }

    if (s.flex.has_value()) {
        const FlexSpec& f = *s.flex;
        if (f.fraction < 0.0 || f.fraction > 1.0) v.push_back("flex.fraction outside [0, 1]");
        if (f.recovery_hours < 1) v.push_back("flex.recovery_hours < 1");
        if (n > 0 && f.recovery_hours > static_cast<int>(n))
            v.push_back("flex.recovery_hours > horizon length");
    }

    if (s.policy.variant == NemVariant::Nem2 && s.policy.nbc < 0.0)
        v.push_back("policy.nbc < 0");
    if (s.policy.variant == NemVariant::Nem3) {
        if (s.policy.acc_hourly.size() != n)
            v.push_back("policy.acc_hourly: length mismatch (" +
                        std::to_string(s.policy.acc_hourly.size()) + " != " +
                        std::to_string(n) + ")");
        if (!s.policy.acc_hourly.all_finite()) v.push_back("policy.acc_hourly: non-finite value");
    }

    return v;
}

} // namespace nemdv
