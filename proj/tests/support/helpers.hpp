// Shared test scaffolding: small scenario builders and solver-independent
// oracles (exhaustive vertex enumeration for LPs, lattice enumeration and
// dynamic programming for battery schedules). The oracles deliberately avoid
// the simplex/branch-and-bound code paths they are used to check.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "nemdv/nemdv.hpp"

namespace testsupport {

using namespace nemdv;

// Flat-price scenario: constant demand and price, zero PV, no assets.
inline Scenario flat_scenario(std::size_t hours, double demand_kw = 100.0,
                              double price = 0.20) {
    Scenario s;
    s.name = "flat";
    s.demand = TimeSeries::constant(demand_kw, hours);
    s.pv_cf = TimeSeries::constant(0.0, hours);
    s.pv = PvSpec{0.0, 1.0};
    s.calendar = Calendar(CivilDateTime{CivilDate{2021, 7, 1}, 0}, hours);
    s.tariff.energy_price = TimeSeries::constant(price, hours);
    s.policy = NemPolicy::no_nem();
    return s;
}

inline Scenario series_scenario(std::vector<double> demand, std::vector<double> prices) {
    Scenario s = flat_scenario(demand.size());
    s.demand = TimeSeries(std::move(demand));
    s.tariff.energy_price = TimeSeries(std::move(prices));
    return s;
}

inline ExportRules no_export_rules(const Scenario& s) {
    return build_export_rules(s.policy, s.tariff, s.calendar, s.bes_scheme());
}

// Export rules with a hand-picked export price series (flags forced on).
inline ExportRules manual_export_rules(const Scenario& s, std::vector<double> export_prices,
                                       bool bes_allowed = true) {
    ExportRules r;
    r.export_price = TimeSeries(std::move(export_prices));
    r.pv_export_allowed = true;
    r.bes_export_allowed = bes_allowed;
    r.s_set = compute_export_window(r.export_price, s.tariff.energy_price);
    return r;
}

// Bare-model builder for solver-level tests (no scenario semantics).
struct ModelBuilder {
    MilpModel model;

    int var(double lo, double hi, double cost, bool binary = false) {
        model.vars.push_back({lo, hi, cost, binary});
        if (binary) model.binary_ids.push_back(static_cast<int>(model.vars.size()) - 1);
        return static_cast<int>(model.vars.size()) - 1;
    }
    void row(Cmp cmp, double rhs, std::vector<LinearTerm> terms) {
        model.rows.push_back(
            {std::move(terms), cmp, rhs, RowId{RowKind::NetDemandDef, static_cast<int>(model.rows.size())}});
    }
};

// ---- dense linear algebra for the vertex-enumeration oracle ----

// Solves a square system with partial pivoting; nullopt when singular.
inline std::optional<std::vector<double>> dense_solve(std::vector<std::vector<double>> a,
                                                      std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
        if (std::abs(a[piv][k]) < 1e-11) return std::nullopt;
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (int i = k + 1; i < n; ++i) {
            const double f = a[i][k] / a[k][k];
            if (f == 0.0) continue;
            for (int jj = k; jj < n; ++jj) a[i][jj] -= f * a[k][jj];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (int i = n - 1; i >= 0; --i) {
        double acc = b[i];
        for (int jj = i + 1; jj < n; ++jj) acc -= a[i][jj] * x[jj];
        x[i] = acc / a[i][i];
    }
    return x;
}

// Exhaustive basic-solution enumeration for a MilpModel treated as an LP.
// Every choice of m basic columns and lower/upper assignment for the
// nonbasic ones yields a candidate vertex; the best feasible one is the
// optimum. Exponential, fine for the tiny models used in tests.
inline std::optional<double> brute_force_lp(const MilpModel& model) {
    const int n = model.num_vars();
    const int m = model.num_rows();
    const int total = n + m;
    const double kInf = std::numeric_limits<double>::infinity();

    std::vector<double> lo(total), hi(total);
    for (int j = 0; j < n; ++j) {
        lo[j] = model.vars[j].lower;
        hi[j] = model.vars[j].upper;
    }
    for (int i = 0; i < m; ++i) {
        switch (model.rows[i].cmp) {
            case Cmp::LE: lo[n + i] = 0.0; hi[n + i] = kInf; break;
            case Cmp::EQ: lo[n + i] = 0.0; hi[n + i] = 0.0; break;
            case Cmp::GE: lo[n + i] = -kInf; hi[n + i] = 0.0; break;
        }
    }
    auto col_entry = [&](int j, int row) -> double {
        if (j >= n) return j - n == row ? 1.0 : 0.0;
        double v = 0.0;
        for (const auto& term : model.rows[row].terms)
            if (term.var == j) v += term.coef;
        return v;
    };

    double best = kInf;
    bool found = false;
    std::vector<int> basic;
    std::vector<int> comb(m);
    // iterate combinations of column indices
    std::vector<bool> in_basis(total, false);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == m) {
            std::vector<int> nonbasic;
            for (int j = 0; j < total; ++j)
                if (!in_basis[j]) nonbasic.push_back(j);
            const int nn = static_cast<int>(nonbasic.size());
            for (int mask = 0; mask < (1 << nn); ++mask) {
                std::vector<double> xn(nn);
                bool ok = true;
                for (int k = 0; k < nn; ++k) {
                    const double b = (mask >> k) & 1 ? hi[nonbasic[k]] : lo[nonbasic[k]];
                    if (!std::isfinite(b)) {
                        ok = false;
                        break;
                    }
                    xn[k] = b;
                }
                if (!ok) continue;
                std::vector<std::vector<double>> B(m, std::vector<double>(m));
                std::vector<double> rhs(m);
                for (int i = 0; i < m; ++i) {
                    rhs[i] = model.rows[i].rhs;
                    for (int k = 0; k < nn; ++k)
                        rhs[i] -= col_entry(nonbasic[k], i) * xn[k];
                    for (int k = 0; k < m; ++k) B[i][k] = col_entry(comb[k], i);
                }
                auto xb = dense_solve(B, rhs);
                if (!xb) continue;
                bool feas = true;
                for (int k = 0; k < m && feas; ++k)
                    if ((*xb)[k] < lo[comb[k]] - 1e-7 || (*xb)[k] > hi[comb[k]] + 1e-7)
                        feas = false;
                if (!feas) continue;
                double obj = 0.0;
                for (int k = 0; k < nn; ++k)
                    if (nonbasic[k] < n) obj += model.vars[nonbasic[k]].cost * xn[k];
                for (int k = 0; k < m; ++k)
                    if (comb[k] < n) obj += model.vars[comb[k]].cost * (*xb)[k];
                if (!found || obj < best) {
                    best = obj;
                    found = true;
                }
            }
            return;
        }
        for (int j = start; j < total; ++j) {
            comb[depth] = j;
            in_basis[j] = true;
            rec(j + 1, depth + 1);
            in_basis[j] = false;
        }
    };
    rec(0, 0);
    if (!found) return std::nullopt;
    return best;
}

// ---- battery schedule oracles ----

// Exhaustive enumeration of battery schedules over a power lattice.
// charge/discharge per step take values in {0, step, 2*step, ..., p_max};
// returns the minimum cost sum(price * net_demand) over feasible schedules
// with soc in [0, cap], terminal soc >= soc_init. Unit efficiency.
inline double battery_lattice_enumeration(const std::vector<double>& demand,
                                          const std::vector<double>& price, double p_max,
                                          double cap, double soc_init, double step) {
    const int H = static_cast<int>(demand.size());
    const int levels = static_cast<int>(std::lround(p_max / step)) + 1;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> cha(H, 0), dis(H, 0);
    std::function<void(int, double, double)> rec = [&](int t, double soc, double cost) {
        if (cost >= best) return;
        if (t == H) {
            if (soc >= soc_init - 1e-9) best = std::min(best, cost);
            return;
        }
        for (int c = 0; c < levels; ++c) {
            for (int d = 0; d < levels; ++d) {
                const double pc = c * step, pd = d * step;
                const double net = demand[t] + pc - pd;
                if (net < -1e-9) continue;
                const double soc2 = soc + pc - pd;
                if (soc2 < -1e-9 || soc2 > cap + 1e-9) continue;
                rec(t + 1, soc2, cost + price[t] * net);
            }
        }
    };
    rec(0, soc_init, 0.0);
    return best;
}

// Dynamic program over a state-of-charge lattice; same contract as the
// enumeration above but scales to 12+ steps.
inline double battery_lattice_dp(const std::vector<double>& demand,
                                 const std::vector<double>& price, double p_max, double cap,
                                 double soc_init, double step) {
    const int H = static_cast<int>(demand.size());
    const int nstates = static_cast<int>(std::lround(cap / step)) + 1;
    const int plevels = static_cast<int>(std::lround(p_max / step)) + 1;
    const double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(nstates, kInf);
    const int s0 = static_cast<int>(std::lround(soc_init / step));
    cost[s0] = 0.0;
    for (int t = 0; t < H; ++t) {
        std::vector<double> next(nstates, kInf);
        for (int s = 0; s < nstates; ++s) {
            if (cost[s] == kInf) continue;
            for (int c = 0; c < plevels; ++c) {
                for (int d = 0; d < plevels; ++d) {
                    const double pc = c * step, pd = d * step;
                    const double net = demand[t] + pc - pd;
                    if (net < -1e-9) continue;
                    const int s2 = s + c - d;
                    if (s2 < 0 || s2 >= nstates) continue;
                    const double v = cost[s] + price[t] * net;
                    if (v < next[s2]) next[s2] = v;
                }
            }
        }
        cost = std::move(next);
    }
    double best = kInf;
    for (int s = s0; s < nstates; ++s) best = std::min(best, cost[s]);
    return best;
}

} // namespace testsupport
