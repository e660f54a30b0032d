// NEM policy variants and export-price construction. Each policy yields a
// per-hour export price series, export eligibility flags, and the set S of
// hours where exporting pays strictly more than the energy price.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "nemdv/assets.hpp"
#include "nemdv/calendar.hpp"
#include "nemdv/tariff.hpp"
#include "nemdv/time_series.hpp"

namespace nemdv {

enum class NemVariant { NoNem, Nem1, Nem2, Nem3 };

inline const char* to_string(NemVariant v) {
    switch (v) {
        case NemVariant::NoNem: return "no_nem";
        case NemVariant::Nem1: return "nem1";
        case NemVariant::Nem2: return "nem2";
        case NemVariant::Nem3: return "nem3";
    }
    return "?";
}

inline std::optional<NemVariant> nem_variant_from_string(const std::string& s) {
    if (s == "no_nem") return NemVariant::NoNem;
    if (s == "nem1") return NemVariant::Nem1;
    if (s == "nem2") return NemVariant::Nem2;
    if (s == "nem3") return NemVariant::Nem3;
    return std::nullopt;
}

constexpr double kDefaultNonBypassableCharge = 0.02977; // $/kWh

struct NemPolicy {
    NemVariant variant = NemVariant::NoNem;
    double nbc = kDefaultNonBypassableCharge; // Nem2 only
    TimeSeries acc_hourly;                    // Nem3 only, aligned to the horizon

    static NemPolicy no_nem() { return NemPolicy{NemVariant::NoNem, 0.0, {}}; }
    static NemPolicy nem1() { return NemPolicy{NemVariant::Nem1, 0.0, {}}; }
    static NemPolicy nem2(double nbc = kDefaultNonBypassableCharge) {
        return NemPolicy{NemVariant::Nem2, nbc, {}};
    }
    static NemPolicy nem3(TimeSeries acc) {
        return NemPolicy{NemVariant::Nem3, 0.0, std::move(acc)};
    }
};

// Export eligibility and pricing for one scenario horizon.
struct ExportRules {
    TimeSeries export_price;      // $/kWh
    bool pv_export_allowed = false;
    bool bes_export_allowed = false;
    std::vector<int> s_set;       // hours with export price strictly above energy price

    ExportRules slice(std::size_t begin, std::size_t end) const {
        ExportRules r;
        r.export_price = export_price.slice(begin, end);
        r.pv_export_allowed = pv_export_allowed;
        r.bes_export_allowed = bes_export_allowed;
        for (int s : s_set) {
            if (s >= static_cast<int>(begin) && s < static_cast<int>(end))
                r.s_set.push_back(s - static_cast<int>(begin));
        }
        return r;
    }
};

// Bucket mean of hourly avoided-cost values grouped by (month,
// weekday-vs-weekend/holiday, hour of day). Every horizon hour receives the
// mean over all horizon hours that share its bucket.
inline TimeSeries average_acc_by_bucket(const TimeSeries& acc, const Calendar& cal) {
    if (acc.size() != cal.size())
        throw std::invalid_argument("avoided-cost series does not cover the horizon: " +
                                    std::to_string(acc.size()) + " values vs " +
                                    std::to_string(cal.size()) + " hours");
    using Bucket = std::tuple<int, bool, int>; // month, weekend/holiday, hour
    std::map<Bucket, std::pair<double, int>> sums;
    for (std::size_t t = 0; t < acc.size(); ++t) {
        const auto& lab = cal[t];
        auto& [sum, count] = sums[{lab.month, lab.weekend_or_holiday, lab.hour}];
        sum += acc[t];
        ++count;
    }
    TimeSeries out = TimeSeries::constant(0.0, acc.size(), acc.start_hour);
    for (std::size_t t = 0; t < acc.size(); ++t) {
        const auto& lab = cal[t];
        const auto& [sum, count] = sums[{lab.month, lab.weekend_or_holiday, lab.hour}];
        out[t] = sum / count;
    }
    return out;
}

// Per-hour export price series for a policy against a tariff horizon.
inline TimeSeries build_export_prices(const NemPolicy& policy, const Tariff& tariff,
                                      const Calendar& cal) {
    const std::size_t n = tariff.horizon();
    if (cal.size() != n)
        throw std::invalid_argument("calendar does not cover the tariff horizon");
    switch (policy.variant) {
        case NemVariant::NoNem:
            return TimeSeries::constant(0.0, n, tariff.energy_price.start_hour);
        case NemVariant::Nem1:
            return tariff.energy_price;
        case NemVariant::Nem2: {
            TimeSeries out = tariff.energy_price;
            for (double& v : out.values) v -= policy.nbc; // negatives preserved
            return out;
        }
        case NemVariant::Nem3:
            return average_acc_by_bucket(policy.acc_hourly, cal);
    }
    throw std::logic_error("unreachable");
}

// Hours where the export price strictly exceeds the energy price, ascending.
inline std::vector<int> compute_export_window(const TimeSeries& export_price,
                                              const TimeSeries& energy_price) {
    if (export_price.size() != energy_price.size())
        throw std::invalid_argument("export/energy price length mismatch: " +
                                    std::to_string(export_price.size()) + " vs " +
                                    std::to_string(energy_price.size()));
    std::vector<int> s;
    for (std::size_t t = 0; t < export_price.size(); ++t)
        if (export_price[t] > energy_price[t]) s.push_back(static_cast<int>(t));
    return s;
}

// (pv_export_allowed, bes_export_allowed) for a policy and battery scheme.
inline std::pair<bool, bool> resolve_export_flags(const NemPolicy& policy,
                                                  std::optional<BesScheme> scheme) {
    if (policy.variant == NemVariant::NoNem) return {false, false};
    if (!scheme.has_value()) return {true, false}; // no battery, nothing to export from it
    switch (*scheme) {
        case BesScheme::GridChargeNoBesExport: return {true, false};
        case BesScheme::PvChargeWithExport: return {true, true};
        case BesScheme::GridChargeWithExport: return {true, true};
    }
    return {true, false};
}

inline ExportRules build_export_rules(const NemPolicy& policy, const Tariff& tariff,
                                      const Calendar& cal,
                                      std::optional<BesScheme> scheme) {
    ExportRules rules;
    rules.export_price = build_export_prices(policy, tariff, cal);
    auto [pv_ok, bes_ok] = resolve_export_flags(policy, scheme);
    rules.pv_export_allowed = pv_ok;
    rules.bes_export_allowed = bes_ok;
    rules.s_set = compute_export_window(rules.export_price, tariff.energy_price);
    return rules;
}

} // namespace nemdv
