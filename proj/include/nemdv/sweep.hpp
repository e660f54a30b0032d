// Scenario grid sweeps: cross products over PV size, battery size/duration,
// management scheme, flexible-demand parameters and NEM policy, with bills
// reported relative to a configurable no-NEM baseline.
#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "nemdv/billing.hpp"
#include "nemdv/log.hpp"
#include "nemdv/scenario.hpp"

namespace nemdv {

enum class BaselineRule {
    PerPvNoNem,  // same PV size (and other axes) under no NEM
    PvOnlyNoNem, // the single PV-only point at full-size PV under no NEM
};

inline const char* to_string(BaselineRule r) {
    return r == BaselineRule::PerPvNoNem ? "per_pv_no_nem" : "pv_only_no_nem";
}

inline std::optional<BaselineRule> baseline_rule_from_string(const std::string& s) {
    if (s == "per_pv_no_nem") return BaselineRule::PerPvNoNem;
    if (s == "pv_only_no_nem") return BaselineRule::PvOnlyNoNem;
    return std::nullopt;
}

struct SweepConfig {
    std::vector<double> pv_ratio;           // of maximum demand
    std::vector<double> bes_power_ratio;    // of maximum demand
    std::vector<double> bes_duration_hours;
    std::vector<BesScheme> schemes;
    std::vector<double> flex_fraction;
    std::vector<int> recovery_hours;
    std::vector<NemVariant> policies;
    std::optional<BaselineRule> baseline;   // defaulted from the axes when unset
    double bes_rte = 0.86;
    double nem2_nbc = kDefaultNonBypassableCharge;
    std::optional<TimeSeries> acc_hourly;   // required when policies include nem3

    // A sweep that only varies PV and policy is a solar-only study; anything
    // varying storage or flexibility compares against the PV-only bill.
    BaselineRule effective_baseline() const {
        if (baseline.has_value()) return *baseline;
        const bool flex_axes = bes_power_ratio.size() > 1 || flex_fraction.size() > 1 ||
                               bes_duration_hours.size() > 1 || recovery_hours.size() > 1 ||
                               schemes.size() > 1 ||
                               (bes_power_ratio.size() == 1 && bes_power_ratio[0] > 0.0) ||
                               (flex_fraction.size() == 1 && flex_fraction[0] > 0.0);
        return flex_axes ? BaselineRule::PvOnlyNoNem : BaselineRule::PerPvNoNem;
    }
};

struct SweepPoint {
    double pv_ratio = 0.0;
    double bes_power_ratio = 0.0;
    double bes_duration_h = 0.0;
    BesScheme scheme = BesScheme::GridChargeNoBesExport;
    double flex_fraction = 0.0;
    int recovery_h = 1;
    NemVariant policy = NemVariant::NoNem;

    auto key() const {
        return std::make_tuple(pv_ratio, bes_power_ratio, bes_duration_h,
                               static_cast<int>(scheme), flex_fraction, recovery_h,
                               static_cast<int>(policy));
    }
    std::string str() const {
        return "pv_ratio=" + std::to_string(pv_ratio) +
               " bes_power_ratio=" + std::to_string(bes_power_ratio) +
               " bes_duration_h=" + std::to_string(bes_duration_h) + " scheme=" +
               to_string(scheme) + " flex_fraction=" + std::to_string(flex_fraction) +
               " recovery_h=" + std::to_string(recovery_h) + " policy=" + to_string(policy);
    }
};

struct ResultRow {
    SweepPoint point;
    BillBreakdown bill;
    std::optional<double> relative_bill; // unset when the baseline bill is zero or failed
    SolveStatus status = SolveStatus::Error;
    double wall_ms = 0.0;
};

namespace detail {

inline std::vector<SweepPoint> expand_grid(const SweepConfig& cfg, const Scenario& base) {
    SweepConfig c = cfg;
    for (double v : c.pv_ratio)
        if (v < 0.0) throw std::invalid_argument("sweep pv_ratio must be >= 0");
    for (double v : c.bes_power_ratio)
        if (v < 0.0) throw std::invalid_argument("sweep bes_power_ratio must be >= 0");
    for (double v : c.bes_duration_hours)
        if (v < 0.0) throw std::invalid_argument("sweep bes_duration_hours must be >= 0");
    for (double v : c.flex_fraction)
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("sweep flex_fraction must lie in [0, 1]");
    for (int v : c.recovery_hours)
        if (v < 1) throw std::invalid_argument("sweep recovery_hours must be >= 1");
    const double maxd = base.demand.max_value();
    if (c.pv_ratio.empty())
        c.pv_ratio = {maxd > 0.0 ? base.pv.rated_kw / maxd : 0.0};
    if (c.bes_power_ratio.empty())
        c.bes_power_ratio = {base.bes && maxd > 0.0 ? base.bes->power_kw / maxd : 0.0};
    if (c.bes_duration_hours.empty())
        c.bes_duration_hours = {base.bes ? base.bes->duration_h : 0.0};
    if (c.schemes.empty())
        c.schemes = {base.bes ? base.bes->scheme : BesScheme::GridChargeNoBesExport};
    if (c.flex_fraction.empty()) c.flex_fraction = {base.flex ? base.flex->fraction : 0.0};
    if (c.recovery_hours.empty()) c.recovery_hours = {base.flex ? base.flex->recovery_hours : 1};
    if (c.policies.empty()) c.policies = {base.policy.variant};

    std::vector<SweepPoint> points;
    for (double pv : c.pv_ratio)
        for (double bp : c.bes_power_ratio)
            for (double bd : c.bes_duration_hours)
                for (BesScheme sch : c.schemes)
                    for (double ff : c.flex_fraction)
                        for (int rh : c.recovery_hours)
                            for (NemVariant pol : c.policies)
                                points.push_back({pv, bp, bd, sch, ff, rh, pol});
    return points;
}

} // namespace detail

// Instantiates the scenario for one grid point. PV and battery power ratings
// scale with the base profile's maximum demand.
inline Scenario make_point_scenario(const Scenario& base, const SweepConfig& cfg,
                                    const SweepPoint& p) {
    Scenario s = base;
    const double maxd = base.demand.max_value();
    s.name = base.name + ":" + p.str();
    s.pv.rated_kw = p.pv_ratio * maxd;
    BesSpec bes = BesSpec::sized(p.bes_power_ratio * maxd, p.bes_duration_h,
                                 base.bes ? base.bes->round_trip_efficiency : cfg.bes_rte,
                                 p.scheme);
    s.bes = bes;
    s.flex = FlexSpec{p.flex_fraction, std::max(1, p.recovery_h)};
    switch (p.policy) {
        case NemVariant::NoNem: s.policy = NemPolicy::no_nem(); break;
        case NemVariant::Nem1: s.policy = NemPolicy::nem1(); break;
        case NemVariant::Nem2: s.policy = NemPolicy::nem2(cfg.nem2_nbc); break;
        case NemVariant::Nem3: {
            if (cfg.acc_hourly.has_value())
                s.policy = NemPolicy::nem3(*cfg.acc_hourly);
            else if (base.policy.variant == NemVariant::Nem3)
                s.policy = base.policy;
            else
                throw std::invalid_argument(
                    "sweep includes nem3 but no avoided-cost series is configured");
            break;
        }
    }
    return s;
}

// The grid point whose bill normalizes a given row under the active rule.
inline SweepPoint baseline_point_for(const SweepPoint& p, BaselineRule rule) {
    SweepPoint b = p;
    b.policy = NemVariant::NoNem;
    if (rule == BaselineRule::PvOnlyNoNem) {
        // One canonical PV-only point; scheme and recovery length are inert
        // once the battery and flexibility are zeroed.
        b.pv_ratio = 1.0;
        b.bes_power_ratio = 0.0;
        b.bes_duration_h = 0.0;
        b.flex_fraction = 0.0;
        b.scheme = BesScheme::GridChargeNoBesExport;
        b.recovery_h = 1;
    }
    return b;
}

// Maps each row to the net bill of its baseline row. Rows must already
// contain every baseline point; a missing one is an error naming the point.
inline std::vector<std::optional<double>> compute_baseline(const SweepConfig& cfg,
                                                           const std::vector<ResultRow>& rows) {
    const BaselineRule rule = cfg.effective_baseline();
    std::map<decltype(std::declval<SweepPoint>().key()), const ResultRow*> by_key;
    for (const auto& row : rows) by_key.emplace(row.point.key(), &row);
    std::vector<std::optional<double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        const SweepPoint b = baseline_point_for(row.point, rule);
        auto it = by_key.find(b.key());
        if (it == by_key.end())
            throw std::invalid_argument("baseline point missing from sweep rows: " + b.str());
        if (it->second->status == SolveStatus::Optimal ||
            it->second->status == SolveStatus::GapLimit)
            out.emplace_back(it->second->bill.net_bill);
        else
            out.emplace_back(std::nullopt);
    }
    return out;
}

// Runs every grid point (plus any baseline points the grid itself does not
// contain), in parallel when jobs > 1. Output order and values do not depend
// on the job count; points that fail to solve are recorded in-row.
inline std::vector<ResultRow> run_sweep(const Scenario& base, const SweepConfig& cfg,
                                        const ScenarioSolveOptions& opt = {}, int jobs = 1) {
    const BaselineRule rule = cfg.effective_baseline();
    std::vector<SweepPoint> grid = detail::expand_grid(cfg, base);

    std::map<decltype(std::declval<SweepPoint>().key()), std::size_t> index_of;
    std::vector<SweepPoint> to_solve = grid;
    for (std::size_t i = 0; i < grid.size(); ++i) index_of.emplace(grid[i].key(), i);
    for (const auto& p : grid) {
        const SweepPoint b = baseline_point_for(p, rule);
        if (!index_of.count(b.key())) {
            index_of.emplace(b.key(), to_solve.size());
            to_solve.push_back(b);
        }
    }

    std::vector<ResultRow> solved(to_solve.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= to_solve.size()) return;
            ResultRow row;
            row.point = to_solve[i];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                Scenario s = make_point_scenario(base, cfg, to_solve[i]);
                ScenarioSolveResult r = solve_scenario(s, opt);
                row.status = r.status;
                row.bill = r.bill;
            } catch (const std::exception& e) {
                log_error("sweep point failed: " + to_solve[i].str() + ": " + e.what());
                row.status = SolveStatus::Error;
            }
            const auto t1 = std::chrono::steady_clock::now();
            row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            solved[i] = std::move(row);
        }
    };
    const int nworkers = std::max(1, std::min<int>(jobs, static_cast<int>(to_solve.size())));
    if (nworkers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nworkers);
        for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<std::optional<double>> baselines = compute_baseline(cfg, solved);
    for (std::size_t i = 0; i < solved.size(); ++i) {
        auto& row = solved[i];
        const bool ok = row.status == SolveStatus::Optimal || row.status == SolveStatus::GapLimit;
        if (ok && baselines[i].has_value() && *baselines[i] != 0.0)
            row.relative_bill = row.bill.net_bill / *baselines[i];
    }
    solved.resize(grid.size()); // drop auxiliary baseline-only solves
    return solved;
}

} // namespace nemdv
