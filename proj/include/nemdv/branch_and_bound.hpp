// Best-bound branch and bound over the model's binary variables. Nodes carry
// their LP relaxation bound; children inherit max(parent, child LP) so bounds
// are monotone. Near-integral candidates are re-solved with the binaries
// pinned to exact 0/1 before they become incumbents.
#pragma once

#include <cmath>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "nemdv/formulation.hpp"
#include "nemdv/log.hpp"
#include "nemdv/milp.hpp"
#include "nemdv/simplex.hpp"

namespace nemdv {

struct MilpResult {
    SolveStatus status = SolveStatus::Error;
    std::vector<double> x;
    double objective = 0.0;
    double best_bound = -std::numeric_limits<double>::infinity();
    long nodes = 0;
    long lp_iterations = 0;
};

// Most-fractional rule; ties break on the lowest variable id (binaries are
// laid out in ascending hour order, so this is the lowest hour).
inline int branch_select(const std::vector<std::pair<int, double>>& fractional) {
    int pick = -1;
    double best = -1.0;
    for (const auto& [id, val] : fractional) {
        const double dist = std::abs(val - std::round(val));
        if (dist > best + 1e-15) {
            best = dist;
            pick = id;
        }
    }
    return pick;
}

namespace detail {

struct BnbNode {
    double bound = 0.0;
    int depth = 0;
    long seq = 0;
    std::vector<std::pair<int, int>> fixings; // (binary id, 0/1)
    std::vector<double> x;                    // LP relaxation solution
    SimplexBasis basis;                       // warm start for the children
};

struct NodeOrder {
    // priority_queue pops the "largest"; invert so the smallest bound wins,
    // then the deepest node, then the earliest sequence number.
    bool operator()(const BnbNode& a, const BnbNode& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.seq > b.seq;
    }
};

} // namespace detail

inline MilpResult solve_milp(const MilpModel& model, const SolverConfig& cfg = {}) {
    MilpResult result;
    BoundedSimplex simplex(model);
    std::vector<double> lb0(model.num_vars()), ub0(model.num_vars());
    for (int j = 0; j < model.num_vars(); ++j) {
        lb0[j] = model.vars[j].lower;
        ub0[j] = model.vars[j].upper;
    }

    auto solve_with = [&](const std::vector<std::pair<int, int>>& fixings,
                          const SimplexBasis* start) {
        std::vector<double> lb = lb0, ub = ub0;
        for (const auto& [id, v] : fixings) {
            lb[id] = v;
            ub[id] = v;
        }
        LpSolution s = simplex.solve(lb, ub, cfg, start);
        result.lp_iterations += s.iterations;
        return s;
    };

    auto fractional_of = [&](const std::vector<double>& x) {
        std::vector<std::pair<int, double>> f;
        for (int id : model.binary_ids)
            if (std::abs(x[id] - std::round(x[id])) > cfg.integrality_tol)
                f.emplace_back(id, x[id]);
        return f;
    };

    LpSolution root = solve_with({}, nullptr);
    result.nodes = 1;
    SimplexBasis root_basis = simplex.final_basis();
    if (root.status == LpStatus::Infeasible) {
        result.status = SolveStatus::Infeasible;
        return result;
    }
    if (root.status == LpStatus::Unbounded) {
        log_error("LP relaxation reported unbounded; model bounds should prevent this");
        result.status = SolveStatus::Unbounded;
        return result;
    }
    if (root.status == LpStatus::IterationLimit) {
        result.status = SolveStatus::Error;
        return result;
    }

    if (model.binary_ids.empty()) {
        result.status = SolveStatus::Optimal;
        result.x = std::move(root.x);
        result.objective = root.objective;
        result.best_bound = result.objective;
        return result;
    }

    const double kInf = std::numeric_limits<double>::infinity();
    double incumbent = kInf;
    std::vector<double> incumbent_x;

    // Re-solve with every binary pinned to an exact 0/1 so incumbents carry
    // exact integrality; falls back to the raw point if pinning turns out
    // infeasible at the margin.
    auto promote = [&](const std::vector<double>& x, double obj, const SimplexBasis& warm) {
        if (obj >= incumbent) return; // cannot improve
        std::vector<std::pair<int, int>> fix;
        fix.reserve(model.binary_ids.size());
        for (int id : model.binary_ids)
            fix.emplace_back(id, static_cast<int>(std::lround(x[id])));
        LpSolution polished = solve_with(fix, &warm);
        if (polished.status == LpStatus::Optimal) {
            if (polished.objective < incumbent) {
                incumbent = polished.objective;
                incumbent_x = std::move(polished.x);
            }
        } else if (obj < incumbent) {
            incumbent = obj;
            incumbent_x = x;
        }
    };

    // Root heuristic: disabling every fractional binary is always feasible
    // and gives the search an upper bound immediately.
    {
        auto frac = fractional_of(root.x);
        if (frac.empty()) {
            promote(root.x, root.objective, root_basis);
            result.status = SolveStatus::Optimal;
            result.x = incumbent_x;
            result.objective = incumbent;
            result.best_bound = root.objective;
            return result;
        }
        std::vector<double> rounded = root.x;
        for (const auto& [id, val] : frac) rounded[id] = 0.0;
        for (int id : model.binary_ids) rounded[id] = std::round(rounded[id]);
        std::vector<std::pair<int, int>> fix;
        for (int id : model.binary_ids)
            fix.emplace_back(id, static_cast<int>(rounded[id]));
        LpSolution heur = solve_with(fix, &root_basis);
        if (heur.status == LpStatus::Optimal && heur.objective < incumbent) {
            incumbent = heur.objective;
            incumbent_x = std::move(heur.x);
        }
    }

    std::priority_queue<detail::BnbNode, std::vector<detail::BnbNode>, detail::NodeOrder> queue;
    long seq = 0;
    detail::BnbNode root_node;
    root_node.bound = root.objective;
    root_node.seq = seq++;
    root_node.x = std::move(root.x);
    root_node.basis = std::move(root_basis);
    queue.push(std::move(root_node));

    double best_bound = -kInf;
    auto gap_ok = [&](double bound) {
        return incumbent - bound <= cfg.gap_tol * std::max(1.0, std::abs(incumbent));
    };

    while (!queue.empty()) {
        detail::BnbNode node = queue.top();
        queue.pop();
        best_bound = std::max(best_bound, node.bound);

        if (incumbent < kInf && gap_ok(node.bound)) {
            result.status = SolveStatus::Optimal;
            result.x = incumbent_x;
            result.objective = incumbent;
            result.best_bound = node.bound;
            return result;
        }
        if (result.nodes >= cfg.node_limit) {
            log_warn("node limit reached with relative gap " +
                     std::to_string((incumbent - node.bound) /
                                    std::max(1.0, std::abs(incumbent))));
            result.status = SolveStatus::GapLimit;
            result.x = incumbent_x;
            result.objective = incumbent;
            result.best_bound = node.bound;
            return result;
        }

        auto frac = fractional_of(node.x);
        if (frac.empty()) {
            promote(node.x, node.bound, node.basis);
            continue;
        }
        const int branch_var = branch_select(frac);
        for (int v : {0, 1}) {
            auto fixings = node.fixings;
            fixings.emplace_back(branch_var, v);
            LpSolution lp = solve_with(fixings, &node.basis);
            ++result.nodes;
            if (lp.status == LpStatus::Infeasible) continue;
            if (lp.status != LpStatus::Optimal) {
                result.status = SolveStatus::Error;
                return result;
            }
            detail::BnbNode child;
            child.bound = std::max(node.bound, lp.objective);
            child.depth = node.depth + 1;
            child.seq = seq++;
            child.fixings = std::move(fixings);
            child.x = std::move(lp.x);
            child.basis = simplex.final_basis();
            if (incumbent < kInf &&
                child.bound >= incumbent - 1e-12 * std::max(1.0, std::abs(incumbent)))
                continue; // dominated
            auto child_frac = fractional_of(child.x);
            if (child_frac.empty()) {
                promote(child.x, child.bound, child.basis);
                continue;
            }
            queue.push(std::move(child));
        }
    }

    if (incumbent < kInf) {
        result.status = SolveStatus::Optimal;
        result.x = incumbent_x;
        result.objective = incumbent;
        result.best_bound = incumbent;
        return result;
    }
    result.status = SolveStatus::Infeasible;
    return result;
}

// Full pipeline for one model: branch and bound, then dispatch extraction.
inline DispatchSolution solve_model(const MilpModel& model, const SolverConfig& cfg = {}) {
    MilpResult r = solve_milp(model, cfg);
    DispatchSolution d = extract_dispatch(model, r.status, r.x, r.objective);
    return d;
}

} // namespace nemdv
