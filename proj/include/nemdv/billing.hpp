// Scenario-level solving. Demand charges bill monthly, so a multi-month
// horizon decomposes into independent per-calendar-month solves with the
// battery reset to its initial state of charge each month; the annual bill
// is the sum of the monthly bills.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nemdv/branch_and_bound.hpp"
#include "nemdv/formulation.hpp"
#include "nemdv/policy.hpp"
#include "nemdv/scenario.hpp"

namespace nemdv {

struct ScenarioSolveOptions {
    SolverConfig solver;
    FormulationOptions formulation;
    bool run_audit = false;  // audit every optimal monthly solve
    double audit_tol = 1e-6;
};

struct MonthResult {
    std::size_t begin = 0, end = 0; // horizon slice
    SolveStatus status = SolveStatus::Error;
    double objective = 0.0;
    BillBreakdown bill;
    long nodes = 0;
    long lp_iterations = 0;
};

struct ScenarioSolveResult {
    SolveStatus status = SolveStatus::Error;
    BillBreakdown bill;            // summed over months
    double solver_objective = 0.0; // summed monthly objectives
    DispatchSolution dispatch;     // concatenated over the horizon
    ExportRules rules;             // full-horizon export rules
    std::vector<MonthResult> months;
    std::vector<AuditFinding> audit_violations;
    std::vector<std::string> audit_warnings;
};

namespace detail {
inline void append_dispatch(DispatchSolution& acc, const DispatchSolution& part) {
    auto cat = [](std::vector<double>& a, const std::vector<double>& b) {
        a.insert(a.end(), b.begin(), b.end());
    };
    cat(acc.net_demand, part.net_demand);
    cat(acc.pv_btm, part.pv_btm);
    cat(acc.pv_export, part.pv_export);
    cat(acc.bes_charge, part.bes_charge);
    cat(acc.bes_discharge_btm, part.bes_discharge_btm);
    cat(acc.bes_discharge_exp, part.bes_discharge_exp);
    cat(acc.flex_up, part.flex_up);
    cat(acc.flex_down, part.flex_down);
    cat(acc.soc, part.soc);
    cat(acc.max_demand, part.max_demand);
    cat(acc.export_flag, part.export_flag);
    cat(acc.bes_mode, part.bes_mode);
}
} // namespace detail

namespace detail {
inline DispatchSolution slice_dispatch(const DispatchSolution& d, std::size_t begin,
                                       std::size_t end) {
    DispatchSolution out;
    out.status = d.status;
    auto cut = [&](const std::vector<double>& v) {
        return std::vector<double>(v.begin() + begin, v.begin() + end);
    };
    out.net_demand = cut(d.net_demand);
    out.pv_btm = cut(d.pv_btm);
    out.pv_export = cut(d.pv_export);
    out.bes_charge = cut(d.bes_charge);
    out.bes_discharge_btm = cut(d.bes_discharge_btm);
    out.bes_discharge_exp = cut(d.bes_discharge_exp);
    out.flex_up = cut(d.flex_up);
    out.flex_down = cut(d.flex_down);
    out.soc = cut(d.soc);
    return out;
}
} // namespace detail

// Re-checks an externally supplied dispatch (for example one read back from
// a CSV dump) against the scenario's constraints, month by month. Period
// maxima and indicator values are reconstructed from the dispatch itself:
// the period maximum is the masked peak of the net-demand column, and an
// export hour's indicator is set exactly when the dispatch exports there.
inline AuditReport audit_scenario_dispatch(const Scenario& s, const DispatchSolution& d,
                                           const FormulationOptions& fopt = {},
                                           double tol = 1e-6) {
    AuditReport report;
    if (d.horizon() != s.horizon()) {
        report.violations.push_back(
            {"dispatch horizon " + std::to_string(d.horizon()) + " != scenario horizon " +
                 std::to_string(s.horizon()),
             0.0});
        return report;
    }
    const ExportRules rules = build_export_rules(s.policy, s.tariff, s.calendar, s.bes_scheme());
    std::size_t month_idx = 0;
    for (const auto& [begin, end] : s.calendar.month_segments()) {
        Scenario sub = s.slice(begin, end);
        ExportRules sub_rules = rules.slice(begin, end);
        MilpModel model = build_milp(sub, sub_rules, fopt);
        DispatchSolution part = detail::slice_dispatch(d, begin, end);
        part.max_demand.assign(sub.tariff.demand_periods.size(), 0.0);
        for (std::size_t n = 0; n < sub.tariff.demand_periods.size(); ++n)
            for (std::size_t t = 0; t < part.net_demand.size(); ++t)
                if (sub.tariff.demand_periods[n].mask[t])
                    part.max_demand[n] = std::max(part.max_demand[n], part.net_demand[t]);
        part.export_flag.resize(sub_rules.s_set.size());
        for (std::size_t k = 0; k < sub_rules.s_set.size(); ++k) {
            const int sh = sub_rules.s_set[k];
            part.export_flag[k] =
                part.pv_export[sh] + part.bes_discharge_exp[sh] > tol ? 1.0 : 0.0;
        }
        if (model.index.strict_mode) {
            part.bes_mode.resize(part.net_demand.size());
            for (std::size_t t = 0; t < part.net_demand.size(); ++t)
                part.bes_mode[t] = part.bes_charge[t] > tol ? 1.0 : 0.0;
        }
        AuditReport month = audit_feasibility(part, model, tol);
        for (auto& f : month.violations) {
            f.where = "month[" + std::to_string(month_idx) + "] " + f.where;
            report.violations.push_back(std::move(f));
        }
        for (auto& w : month.warnings)
            report.warnings.push_back("month[" + std::to_string(month_idx) + "] " + w);
        ++month_idx;
    }
    return report;
}

inline ScenarioSolveResult solve_scenario(const Scenario& s,
                                          const ScenarioSolveOptions& opt = {}) {
    auto violations = validate_scenario(s);
    if (!violations.empty()) {
        std::string msg = "scenario validation failed:";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw std::invalid_argument(msg);
    }

    ScenarioSolveResult result;
    result.rules = build_export_rules(s.policy, s.tariff, s.calendar, s.bes_scheme());
    result.dispatch.status = SolveStatus::Optimal;
    result.status = SolveStatus::Optimal;

    for (const auto& [begin, end] : s.calendar.month_segments()) {
        Scenario sub = s.slice(begin, end);
        ExportRules sub_rules = result.rules.slice(begin, end);
        MilpModel model = build_milp(sub, sub_rules, opt.formulation);
        MilpResult mr = solve_milp(model, opt.solver);
        DispatchSolution part = extract_dispatch(model, mr.status, mr.x, mr.objective);

        MonthResult month;
        month.begin = begin;
        month.end = end;
        month.status = mr.status;
        month.objective = mr.objective;
        month.nodes = mr.nodes;
        month.lp_iterations = mr.lp_iterations;

        if (mr.status == SolveStatus::Optimal || mr.status == SolveStatus::GapLimit) {
            month.bill = compute_bill(part, sub, sub_rules);
            result.bill += month.bill;
            result.solver_objective += mr.objective;
            detail::append_dispatch(result.dispatch, part);
            if (opt.run_audit) {
                AuditReport audit = audit_feasibility(part, model, opt.audit_tol);
                for (auto& f : audit.violations) {
                    f.where = "month[" + std::to_string(result.months.size()) + "] " + f.where;
                    result.audit_violations.push_back(std::move(f));
                }
                for (auto& w : audit.warnings)
                    result.audit_warnings.push_back(
                        "month[" + std::to_string(result.months.size()) + "] " + w);
            }
        }
        if (mr.status != SolveStatus::Optimal && result.status == SolveStatus::Optimal)
            result.status = mr.status;
        result.months.push_back(month);
        if (mr.status == SolveStatus::Infeasible || mr.status == SolveStatus::Unbounded ||
            mr.status == SolveStatus::Error)
            break;
    }
    result.dispatch.status = result.status;
    result.dispatch.objective = result.solver_objective;
    return result;
}

} // namespace nemdv
