// Translates a validated Scenario plus ExportRules into the MILP, and
// independently re-prices and audits any returned dispatch.
//
// Model outline (hourly, kW == kWh per step):
//   min   sum_n dem_price(n) * d_max(n) + sum_t en_price(t) * d_net(t)
//         - sum_t exp_price(t) * (pv_exp(t) + bes_dis_exp(t))
//   s.t.  d_net(t) = d(t) - pv_btm(t) + cha(t) - dis_btm(t) + up(t) - dn(t) >= 0
//         exports at hours in S only when the indicator forces d_net to zero
//         per-period maxima, PV split cap, battery power/energy balance,
//         terminal state of charge, optional PV-only charging, and
//         flexible-demand balance plus rolling recovery windows.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nemdv/milp.hpp"
#include "nemdv/policy.hpp"
#include "nemdv/scenario.hpp"

namespace nemdv {

enum class SolveStatus { Optimal, Infeasible, Unbounded, GapLimit, Error };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::GapLimit: return "gap_limit";
        case SolveStatus::Error: return "error";
    }
    return "?";
}

struct FormulationOptions {
    bool strict_bes = false; // forbid simultaneous charge and discharge (adds binaries)
};

// Upper bound on net demand at hour t: base demand plus everything that can
// add to it (battery charging and upward flex). All other terms subtract.
inline double big_m(std::size_t t, const Scenario& s) {
    double m = s.demand[t];
    if (s.bes.has_value()) m += s.bes->power_kw;
    if (s.flex.has_value()) m += s.flex->fraction * s.demand[t];
    return m;
}

inline MilpModel build_milp(const Scenario& s, const ExportRules& rules,
                            const FormulationOptions& opt = {}) {
    const int H = static_cast<int>(s.horizon());
    const bool has_bes = s.bes.has_value();
    const bool has_flex = s.flex.has_value();
    const double p_bes = has_bes ? s.bes->power_kw : 0.0;
    const double eta_rte = has_bes ? s.bes->round_trip_efficiency : 1.0;
    const double soc_min = has_bes ? s.bes->soc_min_kwh : 0.0;
    const double soc_max = has_bes ? s.bes->soc_max_kwh() : 0.0;
    const double soc_init = has_bes ? s.bes->soc_init_kwh : 0.0;
    const double alpha = has_flex ? s.flex->fraction : 0.0;
    const bool pv_charge_only = has_bes && s.bes->scheme == BesScheme::PvChargeWithExport;

    MilpModel m;
    m.index.horizon = H;
    m.index.n_periods = static_cast<int>(s.tariff.demand_periods.size());
    m.index.s_hours = rules.s_set;
    m.index.strict_mode = opt.strict_bes && has_bes;
    m.vars.resize(m.index.count());

    const auto& vi = m.index;
    auto var = [&](VarRole r, int i) { return vi.at(r, i); };

    // Variable bounds and objective coefficients. Absent assets keep their
    // variables, fixed to zero, so the index layout is uniform across sweeps.
    for (int t = 0; t < H; ++t) {
        const double pv_cap = s.pv.inverter_efficiency * s.pv.rated_kw * s.pv_cf[t];
        const double m_t = big_m(t, s);
        const double dev_cap = alpha * s.demand[t];

        m.vars[var(VarRole::NetDemand, t)] = {0.0, m_t, s.tariff.energy_price[t], false};
        m.vars[var(VarRole::PvBtm, t)] = {0.0, pv_cap, 0.0, false};
        m.vars[var(VarRole::PvExport, t)] = {0.0, rules.pv_export_allowed ? pv_cap : 0.0,
                                             -rules.export_price[t], false};
        m.vars[var(VarRole::BesCharge, t)] = {0.0, p_bes, 0.0, false};
        m.vars[var(VarRole::BesDischargeBtm, t)] = {0.0, p_bes, 0.0, false};
        m.vars[var(VarRole::BesDischargeExp, t)] = {
            0.0, (has_bes && rules.bes_export_allowed) ? p_bes : 0.0,
            -rules.export_price[t], false};
        m.vars[var(VarRole::FlexUp, t)] = {0.0, dev_cap, 0.0, false};
        m.vars[var(VarRole::FlexDown, t)] = {0.0, dev_cap, 0.0, false};
        m.vars[var(VarRole::Soc, t)] = {soc_min, soc_max, 0.0, false};
    }
    for (int n = 0; n < vi.n_periods; ++n) {
        const auto& period = s.tariff.demand_periods[n];
        double ub = 0.0;
        for (int t = 0; t < H; ++t)
            if (period.mask[t]) ub = std::max(ub, big_m(t, s));
        m.vars[var(VarRole::MaxDemand, n)] = {0.0, ub, period.price, false};
    }
    for (int k = 0; k < static_cast<int>(vi.s_hours.size()); ++k) {
        int id = var(VarRole::ExportFlag, k);
        m.vars[id] = {0.0, 1.0, 0.0, true};
        m.binary_ids.push_back(id);
    }
    if (vi.strict_mode) {
        for (int t = 0; t < H; ++t) {
            int id = var(VarRole::BesMode, t);
            m.vars[id] = {0.0, 1.0, 0.0, true};
            m.binary_ids.push_back(id);
        }
    }

    auto add_row = [&](RowId id, Cmp cmp, double rhs) -> ConstraintRow& {
        m.rows.push_back(ConstraintRow{{}, cmp, rhs, id});
        return m.rows.back();
    };

    for (int t = 0; t < H; ++t) {
        // d_net(t) + pv_btm - cha + dis_btm - up + dn = d(t)
        auto& def = add_row({RowKind::NetDemandDef, t}, Cmp::EQ, s.demand[t]);
        def.terms = {{var(VarRole::NetDemand, t), 1.0}, {var(VarRole::PvBtm, t), 1.0},
                     {var(VarRole::BesCharge, t), -1.0}, {var(VarRole::BesDischargeBtm, t), 1.0},
                     {var(VarRole::FlexUp, t), -1.0}, {var(VarRole::FlexDown, t), 1.0}};

        const double pv_cap = s.pv.inverter_efficiency * s.pv.rated_kw * s.pv_cf[t];
        auto& cap = add_row({RowKind::PvCap, t}, Cmp::LE, pv_cap);
        cap.terms = {{var(VarRole::PvBtm, t), 1.0}, {var(VarRole::PvExport, t), 1.0}};

        if (has_bes) {
            auto& dis = add_row({RowKind::BesDischargeCap, t}, Cmp::LE, p_bes);
            dis.terms = {{var(VarRole::BesDischargeBtm, t), 1.0},
                         {var(VarRole::BesDischargeExp, t), 1.0}};

            // soc(t) - soc(t-1) - eta*cha + dis_btm + dis_exp = 0 (J_init seeds t = 0)
            auto& soc = add_row({RowKind::SocBalance, t}, Cmp::EQ, t == 0 ? soc_init : 0.0);
            soc.terms = {{var(VarRole::Soc, t), 1.0}, {var(VarRole::BesCharge, t), -eta_rte},
                         {var(VarRole::BesDischargeBtm, t), 1.0},
                         {var(VarRole::BesDischargeExp, t), 1.0}};
            if (t > 0) soc.terms.push_back({var(VarRole::Soc, t - 1), -1.0});

            if (pv_charge_only) {
                auto& link = add_row({RowKind::PvChargeOnly, t}, Cmp::LE, 0.0);
                link.terms = {{var(VarRole::BesCharge, t), 1.0}, {var(VarRole::PvBtm, t), -1.0}};
            }
        }
    }

    if (has_bes) {
        auto& term = add_row({RowKind::SocTerminal}, Cmp::GE, soc_init);
        term.terms = {{var(VarRole::Soc, H - 1), 1.0}};
    }

    for (int n = 0; n < vi.n_periods; ++n) {
        const auto& period = s.tariff.demand_periods[n];
        for (int t = 0; t < H; ++t) {
            if (!period.mask[t]) continue;
            auto& row = add_row({RowKind::MaxDemandLink, t, n}, Cmp::LE, 0.0);
            row.terms = {{var(VarRole::NetDemand, t), 1.0}, {var(VarRole::MaxDemand, n), -1.0}};
        }
    }

    const double export_power = s.pv.rated_kw + p_bes;
    for (int k = 0; k < static_cast<int>(vi.s_hours.size()); ++k) {
        const int sh = vi.s_hours[k];
        auto& cap = add_row({RowKind::ExportCap, sh}, Cmp::LE, 0.0);
        cap.terms = {{var(VarRole::PvExport, sh), 1.0}, {var(VarRole::BesDischargeExp, sh), 1.0},
                     {var(VarRole::ExportFlag, k), -export_power}};

        // d_net(s) <= M(s) * (1 - zeta(s))
        const double m_s = big_m(sh, s);
        auto& gate = add_row({RowKind::NetZeroOnExport, sh}, Cmp::LE, m_s);
        gate.terms = {{var(VarRole::NetDemand, sh), 1.0}, {var(VarRole::ExportFlag, k), m_s}};
    }

    if (has_flex) {
        const int delta = s.flex->recovery_hours;
        auto& bal = add_row({RowKind::FlexBalance}, Cmp::EQ, 0.0);
        for (int t = 0; t < H; ++t) {
            bal.terms.push_back({var(VarRole::FlexUp, t), 1.0});
            bal.terms.push_back({var(VarRole::FlexDown, t), -1.0});
        }
        for (int k = 0; k + delta <= H; ++k) {
            auto& win = add_row({RowKind::FlexWindow, k}, Cmp::GE, 0.0);
            for (int t = k; t < k + delta; ++t) {
                win.terms.push_back({var(VarRole::FlexUp, t), 1.0});
                win.terms.push_back({var(VarRole::FlexDown, t), -1.0});
            }
        }
    }

    if (vi.strict_mode) {
        for (int t = 0; t < H; ++t) {
            auto& cha = add_row({RowKind::StrictCharge, t}, Cmp::LE, 0.0);
            cha.terms = {{var(VarRole::BesCharge, t), 1.0}, {var(VarRole::BesMode, t), -p_bes}};
            auto& dis = add_row({RowKind::StrictDischarge, t}, Cmp::LE, p_bes);
            dis.terms = {{var(VarRole::BesDischargeBtm, t), 1.0},
                         {var(VarRole::BesDischargeExp, t), 1.0},
                         {var(VarRole::BesMode, t), p_bes}};
        }
    }

    // Starting-basis hint: net demand on its definition row, state of charge
    // on its balance row, and each period maximum on the link row of its
    // masked peak hour. With all assets idle this basis is primal feasible
    // (the do-nothing dispatch), so the solver usually skips phase 1.
    m.basis_hint.assign(m.rows.size(), -1);
    std::vector<int> peak_hour(vi.n_periods, -1);
    for (int n = 0; n < vi.n_periods; ++n) {
        const auto& period = s.tariff.demand_periods[n];
        double peak = -1.0;
        for (int t = 0; t < H; ++t)
            if (period.mask[t] && s.demand[t] > peak) {
                peak = s.demand[t];
                peak_hour[n] = t;
            }
    }
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        const RowId id = m.rows[i].id;
        if (id.kind == RowKind::NetDemandDef)
            m.basis_hint[i] = var(VarRole::NetDemand, id.t);
        else if (id.kind == RowKind::SocBalance)
            m.basis_hint[i] = var(VarRole::Soc, id.t);
        else if (id.kind == RowKind::MaxDemandLink && id.t == peak_hour[id.n])
            m.basis_hint[i] = var(VarRole::MaxDemand, id.n);
    }

    return m;
}

struct DispatchSolution {
    SolveStatus status = SolveStatus::Error;
    double objective = 0.0;
    std::vector<double> net_demand;  // per hour, kW
    std::vector<double> pv_btm;
    std::vector<double> pv_export;
    std::vector<double> bes_charge;
    std::vector<double> bes_discharge_btm;
    std::vector<double> bes_discharge_exp;
    std::vector<double> flex_up;
    std::vector<double> flex_down;
    std::vector<double> soc;         // kWh
    std::vector<double> max_demand;  // per demand period
    std::vector<double> export_flag; // per export-window hour
    std::vector<double> bes_mode;    // strict mode only

    std::size_t horizon() const { return net_demand.size(); }

    bool has_values() const { return !net_demand.empty(); }

    // Flat assignment in model id order; inverse of extract_dispatch.
    std::vector<double> to_assignment(const VarIndex& vi) const;
};

inline DispatchSolution extract_dispatch(const MilpModel& m, SolveStatus status,
                                         const std::vector<double>& raw,
                                         double objective = 0.0) {
    DispatchSolution d;
    d.status = status;
    if (status == SolveStatus::Infeasible || status == SolveStatus::Unbounded ||
        status == SolveStatus::Error || raw.empty())
        return d;
    if (static_cast<int>(raw.size()) < m.index.count())
        throw std::invalid_argument("assignment does not cover all variable ids (" +
                                    std::to_string(raw.size()) + " < " +
                                    std::to_string(m.index.count()) + ")");
    const auto& vi = m.index;
    const int H = vi.horizon;
    auto pull = [&](VarRole r, int count) {
        std::vector<double> v(count);
        for (int i = 0; i < count; ++i) v[i] = raw[vi.at(r, i)];
        return v;
    };
    d.net_demand = pull(VarRole::NetDemand, H);
    d.pv_btm = pull(VarRole::PvBtm, H);
    d.pv_export = pull(VarRole::PvExport, H);
    d.bes_charge = pull(VarRole::BesCharge, H);
    d.bes_discharge_btm = pull(VarRole::BesDischargeBtm, H);
    d.bes_discharge_exp = pull(VarRole::BesDischargeExp, H);
    d.flex_up = pull(VarRole::FlexUp, H);
    d.flex_down = pull(VarRole::FlexDown, H);
    d.soc = pull(VarRole::Soc, H);
    d.max_demand = pull(VarRole::MaxDemand, vi.n_periods);
    d.export_flag = pull(VarRole::ExportFlag, static_cast<int>(vi.s_hours.size()));
    if (vi.strict_mode) d.bes_mode = pull(VarRole::BesMode, H);
    d.objective = objective;
    return d;
}

inline std::vector<double> DispatchSolution::to_assignment(const VarIndex& vi) const {
    std::vector<double> x(vi.count(), 0.0);
    auto push = [&](VarRole r, const std::vector<double>& v) {
        for (int i = 0; i < static_cast<int>(v.size()); ++i) x[vi.at(r, i)] = v[i];
    };
    push(VarRole::NetDemand, net_demand);
    push(VarRole::PvBtm, pv_btm);
    push(VarRole::PvExport, pv_export);
    push(VarRole::BesCharge, bes_charge);
    push(VarRole::BesDischargeBtm, bes_discharge_btm);
    push(VarRole::BesDischargeExp, bes_discharge_exp);
    push(VarRole::FlexUp, flex_up);
    push(VarRole::FlexDown, flex_down);
    push(VarRole::Soc, soc);
    push(VarRole::MaxDemand, max_demand);
    push(VarRole::ExportFlag, export_flag);
    if (vi.strict_mode) push(VarRole::BesMode, bes_mode);
    return x;
}

struct BillBreakdown {
    double demand_charge_total = 0.0;
    double energy_charge_total = 0.0;
    double export_revenue = 0.0;
    double net_bill = 0.0;

    BillBreakdown& operator+=(const BillBreakdown& o) {
        demand_charge_total += o.demand_charge_total;
        energy_charge_total += o.energy_charge_total;
        export_revenue += o.export_revenue;
        net_bill += o.net_bill;
        return *this;
    }
};

// Re-prices a dispatch from first principles: net demand is rebuilt from the
// asset schedules and period maxima are taken over the rebuilt series, so the
// result is independent of the solver's reported objective.
inline BillBreakdown compute_bill(const DispatchSolution& d, const Scenario& s,
                                  const ExportRules& rules) {
    BillBreakdown bill;
    const std::size_t H = s.horizon();
    std::vector<double> net(H);
    for (std::size_t t = 0; t < H; ++t) {
        net[t] = s.demand[t] - d.pv_btm[t] + d.bes_charge[t] - d.bes_discharge_btm[t] +
                 d.flex_up[t] - d.flex_down[t];
        bill.energy_charge_total += s.tariff.energy_price[t] * net[t];
        bill.export_revenue += rules.export_price[t] * (d.pv_export[t] + d.bes_discharge_exp[t]);
    }
    for (const auto& period : s.tariff.demand_periods) {
        double peak = 0.0;
        for (std::size_t t = 0; t < H; ++t)
            if (period.mask[t]) peak = std::max(peak, net[t]);
        bill.demand_charge_total += period.price * peak;
    }
    bill.net_bill = bill.demand_charge_total + bill.energy_charge_total - bill.export_revenue;
    return bill;
}

struct AuditFinding {
    std::string where;
    double residual = 0.0;
};

struct AuditReport {
    std::vector<AuditFinding> violations;
    std::vector<std::string> warnings; // advisory only, e.g. simultaneous charge/discharge

    bool clean() const { return violations.empty(); }
};

// Checks a dispatch against every row and bound of the model. Violations
// beyond tol are reported with the row id and signed residual.
inline AuditReport audit_feasibility(const DispatchSolution& d, const MilpModel& m,
                                     double tol = 1e-6) {
    AuditReport report;
    const std::vector<double> x = d.to_assignment(m.index);

    for (int j = 0; j < m.num_vars(); ++j) {
        if (x[j] < m.vars[j].lower - tol)
            report.violations.push_back({"bound " + m.index.name(j) + " below lower",
                                         x[j] - m.vars[j].lower});
        else if (x[j] > m.vars[j].upper + tol)
            report.violations.push_back({"bound " + m.index.name(j) + " above upper",
                                         x[j] - m.vars[j].upper});
        if (m.vars[j].is_binary && std::abs(x[j] - std::round(x[j])) > tol)
            report.violations.push_back({"integrality " + m.index.name(j),
                                         x[j] - std::round(x[j])});
    }

    for (const auto& row : m.rows) {
        double lhs = 0.0;
        for (const auto& term : row.terms) lhs += term.coef * x[term.var];
        const double r = lhs - row.rhs;
        bool bad = (row.cmp == Cmp::EQ && std::abs(r) > tol) || (row.cmp == Cmp::LE && r > tol) ||
                   (row.cmp == Cmp::GE && r < -tol);
        if (bad) report.violations.push_back({row.id.str(), r});
    }

    for (std::size_t t = 0; t < d.horizon(); ++t) {
        const double dis = d.bes_discharge_btm[t] + d.bes_discharge_exp[t];
        if (d.bes_charge[t] > tol && dis > tol)
            report.warnings.push_back("simultaneous charge and discharge at t=" +
                                      std::to_string(t));
    }
    return report;
}

} // namespace nemdv
