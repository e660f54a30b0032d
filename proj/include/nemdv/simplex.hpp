// Bounded-variable revised primal simplex over sparse rows.
//
// Rows are turned into equalities with one logical column each; structural
// box bounds are handled implicitly (nonbasic variables sit at a bound).
// The basis is held as a sparse LU factorization (left-looking, threshold
// pivoting biased toward sparse rows) refreshed periodically, with
// product-form eta updates between refactorizations. Phase 1 relaxes the
// bound a basic variable violates, prices the violation at unit cost, and
// minimizes total infeasibility before the real objective — the classic
// artificial-variable scheme without materializing artificial columns.
//
// Determinism: entering/leaving ties break on the lowest index, so identical
// models produce identical iteration sequences.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nemdv/log.hpp"
#include "nemdv/milp.hpp"

namespace nemdv {

// All solver tolerances in one place.
struct SolverConfig {
    double feas_tol = 1e-7;       // primal feasibility on rows and bounds
    double opt_tol = 1e-9;        // reduced-cost threshold
    double pivot_tol = 1e-8;      // smallest usable ratio-test pivot
    double integrality_tol = 1e-6;
    double gap_tol = 1e-6;        // relative branch-and-bound gap
    int refactor_interval = 64;   // eta count triggering refactorization
    long node_limit = 200000;
    int degenerate_limit_factor = 5; // switch to Bland after factor*rows degenerate pivots
    int iteration_limit_factor = 50; // hard cap factor*(rows+cols)
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration_limit";
    }
    return "?";
}

struct LpSolution {
    LpStatus status = LpStatus::IterationLimit;
    std::vector<double> x; // structural variable values
    double objective = 0.0;
    long iterations = 0;
};

// A resumable snapshot of the simplex basis: which column is basic in each
// slot and where every nonbasic column sits. Vastly cheaper to restart from
// than the crash basis when only a bound changed (branch-and-bound children).
struct SimplexBasis {
    std::vector<int> basic_var;            // per slot
    std::vector<unsigned char> at_upper;   // per column (n + m), nonbasic side
    bool empty() const { return basic_var.empty(); }
};

class BoundedSimplex {
public:
    explicit BoundedSimplex(const MilpModel& model) {
        n_ = model.num_vars();
        m_ = model.num_rows();
        cost_.resize(n_);
        base_lb_.resize(n_);
        base_ub_.resize(n_);
        for (int j = 0; j < n_; ++j) {
            cost_[j] = model.vars[j].cost;
            base_lb_[j] = model.vars[j].lower;
            base_ub_[j] = model.vars[j].upper;
        }
        rhs_.resize(m_);
        logical_lb_.resize(m_);
        logical_ub_.resize(m_);
        std::vector<std::vector<LinearTerm>> cols(n_);
        row_nnz_.assign(m_, 1); // every row owns its logical
        for (int i = 0; i < m_; ++i) {
            const auto& row = model.rows[i];
            rhs_[i] = row.rhs;
            for (const auto& term : row.terms) {
                if (term.coef == 0.0) continue;
                cols[term.var].push_back({i, term.coef});
                ++row_nnz_[i];
            }
            switch (row.cmp) {
                case Cmp::LE:
                    logical_lb_[i] = 0.0;
                    logical_ub_[i] = kInf;
                    break;
                case Cmp::EQ:
                    logical_lb_[i] = 0.0;
                    logical_ub_[i] = 0.0;
                    break;
                case Cmp::GE:
                    logical_lb_[i] = -kInf;
                    logical_ub_[i] = 0.0;
                    break;
            }
        }
        col_ptr_.assign(n_ + 1, 0);
        for (int j = 0; j < n_; ++j) col_ptr_[j + 1] = col_ptr_[j] + static_cast<int>(cols[j].size());
        col_row_.resize(col_ptr_[n_]);
        col_val_.resize(col_ptr_[n_]);
        for (int j = 0; j < n_; ++j) {
            int p = col_ptr_[j];
            for (const auto& term : cols[j]) {
                col_row_[p] = term.var;
                col_val_[p] = term.coef;
                ++p;
            }
        }
        basis_hint_ = model.basis_hint;
    }

    int num_structural() const { return n_; }
    int num_rows() const { return m_; }

    // Solves with the model's own bounds.
    LpSolution solve(const SolverConfig& cfg) { return solve(base_lb_, base_ub_, cfg); }

    // Solves with overridden structural bounds (used by branch and bound);
    // `start` optionally resumes from a previously returned basis.
    LpSolution solve(const std::vector<double>& lb, const std::vector<double>& ub,
                     const SolverConfig& cfg, const SimplexBasis* start = nullptr) {
        cfg_ = cfg;
        init_state(lb, ub, start);
        LpSolution sol;
        sol.status = run();
        sol.iterations = iterations_;
        if (sol.status == LpStatus::Optimal) {
            refresh(); // final factorization for tight residuals
            sol.x = structural_values();
            double obj = 0.0;
            for (int j = 0; j < n_; ++j) obj += cost_[j] * sol.x[j];
            sol.objective = obj;
        }
        return sol;
    }

    // Basis after the last solve, resumable via `start`.
    SimplexBasis final_basis() const {
        SimplexBasis b;
        b.basic_var = basic_var_;
        b.at_upper.resize(n_ + m_);
        for (int j = 0; j < n_ + m_; ++j)
            b.at_upper[j] = vstat_[j] == VStat::AtUpper ? 1 : 0;
        return b;
    }

private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();
    enum class VStat : unsigned char { Basic, AtLower, AtUpper };

    // ---- problem data ----
    int n_ = 0; // structural columns
    int m_ = 0; // rows == logical columns
    std::vector<double> cost_, base_lb_, base_ub_, rhs_;
    std::vector<double> logical_lb_, logical_ub_;
    std::vector<int> col_ptr_, col_row_;
    std::vector<double> col_val_;
    std::vector<int> row_nnz_; // static row counts, pivot-choice bias
    std::vector<int> basis_hint_;
    SolverConfig cfg_;

    // ---- per-solve state ----
    std::vector<double> lb_, ub_;   // working bounds for all n_ + m_ columns
    std::vector<double> xval_;      // current value per column (basic ones mirrored from xb_)
    std::vector<VStat> vstat_;
    std::vector<int> basic_var_;    // slot -> column
    std::vector<double> xb_;        // slot -> value
    std::vector<signed char> viol_; // slot -> 0 feasible, +1 above upper, -1 below lower
    int n_infeasible_ = 0;
    long iterations_ = 0;
    long degenerate_pivots_ = 0;
    bool bland_ = false;
    bool phase1_ = true;

    // ---- LU factors of the basis, plus eta file ----
    struct Eta {
        int slot;
        double pivot;
        std::vector<std::pair<int, double>> col; // includes the pivot slot entry
    };
    std::vector<Eta> etas_;
    // L: unit lower factor by pivot order; entries are (row, multiplier).
    std::vector<std::vector<std::pair<int, double>>> lcols_;
    // U: column k holds entries at earlier pivot positions plus its diagonal.
    std::vector<std::vector<std::pair<int, double>>> ucols_;
    std::vector<double> updiag_;
    std::vector<int> pivot_row_of_; // factor position -> row
    std::vector<int> slot_of_pos_;  // factor position -> basis slot
    std::vector<int> pos_of_slot_;  // basis slot -> factor position
    std::vector<double> work_, work2_;
    std::vector<int> touched_;

    double true_lb(int j) const { return j < n_ ? lb_[j] : logical_lb_[j - n_]; }
    double true_ub(int j) const { return j < n_ ? ub_[j] : logical_ub_[j - n_]; }

    template <class Fn>
    void for_col(int j, Fn&& fn) const {
        if (j < n_) {
            for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) fn(col_row_[p], col_val_[p]);
        } else {
            fn(j - n_, 1.0);
        }
    }

    void set_nonbasic_value(int j) {
        const double lo = lb_[j], hi = ub_[j];
        if (vstat_[j] == VStat::AtUpper && std::isfinite(hi)) {
            xval_[j] = hi;
        } else if (std::isfinite(lo)) {
            vstat_[j] = VStat::AtLower;
            xval_[j] = lo;
        } else if (std::isfinite(hi)) {
            vstat_[j] = VStat::AtUpper;
            xval_[j] = hi;
        } else {
            vstat_[j] = VStat::AtLower; // free column, parked at zero
            xval_[j] = 0.0;
        }
    }

    void reset_to_slack_basis() {
        for (int j = 0; j < n_ + m_; ++j) {
            vstat_[j] = VStat::AtLower;
            set_nonbasic_value(j);
        }
        for (int i = 0; i < m_; ++i) {
            basic_var_[i] = n_ + i;
            vstat_[n_ + i] = VStat::Basic;
        }
    }

    // True when `start` names every slot exactly once with valid columns.
    bool apply_start_basis(const SimplexBasis& start) {
        if (static_cast<int>(start.basic_var.size()) != m_ ||
            static_cast<int>(start.at_upper.size()) != n_ + m_)
            return false;
        std::vector<char> used(n_ + m_, 0);
        for (int i = 0; i < m_; ++i) {
            const int c = start.basic_var[i];
            if (c < 0 || c >= n_ + m_ || used[c]) return false;
            used[c] = 1;
        }
        for (int j = 0; j < n_ + m_; ++j) {
            if (used[j]) {
                vstat_[j] = VStat::Basic;
            } else {
                vstat_[j] = start.at_upper[j] ? VStat::AtUpper : VStat::AtLower;
                set_nonbasic_value(j);
            }
        }
        basic_var_ = start.basic_var;
        return true;
    }

    void apply_hint_basis() {
        reset_to_slack_basis();
        if (static_cast<int>(basis_hint_.size()) != m_) return;
        for (int i = 0; i < m_; ++i) {
            const int c = basis_hint_[i];
            if (c < 0 || c >= n_) continue;
            if (vstat_[c] == VStat::Basic) continue;
            if (lb_[c] == ub_[c]) continue; // fixed columns stay nonbasic
            vstat_[n_ + i] = VStat::AtLower;
            set_nonbasic_value(n_ + i);
            basic_var_[i] = c;
            vstat_[c] = VStat::Basic;
        }
    }

    void init_state(const std::vector<double>& lb, const std::vector<double>& ub,
                    const SimplexBasis* start) {
        lb_.resize(n_ + m_);
        ub_.resize(n_ + m_);
        for (int j = 0; j < n_; ++j) {
            lb_[j] = lb[j];
            ub_[j] = ub[j];
        }
        for (int i = 0; i < m_; ++i) {
            lb_[n_ + i] = logical_lb_[i];
            ub_[n_ + i] = logical_ub_[i];
        }
        xval_.assign(n_ + m_, 0.0);
        vstat_.assign(n_ + m_, VStat::AtLower);
        basic_var_.resize(m_);
        xb_.assign(m_, 0.0);
        viol_.assign(m_, 0);
        iterations_ = 0;
        degenerate_pivots_ = 0;
        bland_ = false;
        etas_.clear();

        bool placed = start != nullptr && apply_start_basis(*start);
        if (!placed) apply_hint_basis();
        try {
            factorize();
        } catch (const std::runtime_error&) {
            if (placed) {
                // Stale resume basis went singular; retry from the hint.
                apply_hint_basis();
                try {
                    factorize();
                } catch (const std::runtime_error&) {
                    reset_to_slack_basis();
                    factorize();
                }
            } else {
                reset_to_slack_basis();
                factorize();
            }
        }
        compute_basic_values();
    }

    // ---- factorization ----

    void factorize() {
        lcols_.assign(m_, {});
        ucols_.assign(m_, {});
        updiag_.assign(m_, 0.0);
        pivot_row_of_.assign(m_, -1);
        slot_of_pos_.assign(m_, -1);
        pos_of_slot_.assign(m_, -1);
        etas_.clear();
        work_.assign(m_, 0.0);
        work2_.assign(m_, 0.0);

        std::vector<int> row_pos(m_, -1); // row -> factor position once pivoted
        std::vector<int> order(m_);
        for (int k = 0; k < m_; ++k) order[k] = k;
        auto col_len = [&](int slot) {
            int j = basic_var_[slot];
            return j < n_ ? col_ptr_[j + 1] - col_ptr_[j] : 1;
        };
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return col_len(a) < col_len(b); });

        std::vector<double>& x = work_;
        std::vector<int>& nz = touched_;
        nz.clear();
        std::vector<char> reached(m_, 0);
        std::vector<int> stack, reach;

        for (int k = 0; k < m_; ++k) {
            const int slot = order[k];
            const int j = basic_var_[slot];
            nz.clear();
            for_col(j, [&](int r, double v) {
                if (x[r] == 0.0) nz.push_back(r);
                x[r] += v;
            });
            // Symbolic pass: factor positions whose pivot rows this column can
            // touch, directly or through fill.
            reach.clear();
            stack.clear();
            for (int r : nz)
                if (row_pos[r] >= 0 && !reached[row_pos[r]]) {
                    reached[row_pos[r]] = 1;
                    stack.push_back(row_pos[r]);
                }
            while (!stack.empty()) {
                const int kk = stack.back();
                stack.pop_back();
                reach.push_back(kk);
                for (const auto& [r, mult] : lcols_[kk]) {
                    (void)mult;
                    const int k2 = row_pos[r];
                    if (k2 >= 0 && !reached[k2]) {
                        reached[k2] = 1;
                        stack.push_back(k2);
                    }
                }
            }
            std::sort(reach.begin(), reach.end());
            // Numeric elimination in factor order; L columns only write to
            // rows pivoted later, so ascending order respects dependencies.
            for (int kk : reach) {
                reached[kk] = 0;
                const int pr = pivot_row_of_[kk];
                const double xv = x[pr];
                if (xv == 0.0) continue;
                for (const auto& [r, mult] : lcols_[kk]) {
                    if (x[r] == 0.0) nz.push_back(r);
                    x[r] -= mult * xv;
                }
            }
            // Split into U part (pivoted rows) and candidate pivots.
            double max_abs = 0.0;
            for (int r : nz)
                if (row_pos[r] < 0) max_abs = std::max(max_abs, std::abs(x[r]));
            if (max_abs <= 1e-12)
                throw std::runtime_error("singular basis at factor position " +
                                         std::to_string(k));
            int pivot_row = -1;
            int best_count = std::numeric_limits<int>::max();
            for (int r : nz) {
                if (row_pos[r] >= 0) continue;
                const double a = std::abs(x[r]);
                if (a < 0.1 * max_abs || a <= 1e-12) continue;
                if (row_nnz_[r] < best_count ||
                    (row_nnz_[r] == best_count && (pivot_row < 0 || r < pivot_row))) {
                    best_count = row_nnz_[r];
                    pivot_row = r;
                }
            }
            const double pivot = x[pivot_row];
            auto& lcol = lcols_[k];
            auto& ucol = ucols_[k];
            for (int r : nz) {
                const double v = x[r];
                x[r] = 0.0;
                if (v == 0.0 || r == pivot_row) continue;
                if (row_pos[r] >= 0)
                    ucol.emplace_back(row_pos[r], v);
                else if (std::abs(v) > 1e-13)
                    lcol.emplace_back(r, v / pivot);
            }
            x[pivot_row] = 0.0;
            std::sort(ucol.begin(), ucol.end());
            std::sort(lcol.begin(), lcol.end());
            updiag_[k] = pivot;
            pivot_row_of_[k] = pivot_row;
            row_pos[pivot_row] = k;
            slot_of_pos_[k] = slot;
            pos_of_slot_[slot] = k;
        }
    }

    // Solve B * out = v. v is dense of size m_ (indexed by row); out is dense
    // indexed by basis slot.
    void ftran(std::vector<double>& v, std::vector<double>& out) {
        // L solve in factor order.
        for (int k = 0; k < m_; ++k) {
            const double xv = v[pivot_row_of_[k]];
            if (xv == 0.0) continue;
            for (const auto& [r, mult] : lcols_[k]) v[r] -= mult * xv;
        }
        // U back substitution in reverse factor order.
        std::fill(out.begin(), out.end(), 0.0);
        for (int k = m_ - 1; k >= 0; --k) {
            const double xc = v[pivot_row_of_[k]] / updiag_[k];
            out[slot_of_pos_[k]] = xc;
            if (xc == 0.0) continue;
            for (const auto& [kk, coef] : ucols_[k]) v[pivot_row_of_[kk]] -= coef * xc;
        }
        for (int k = 0; k < m_; ++k) v[pivot_row_of_[k]] = 0.0;
        // Eta file, oldest first.
        for (const auto& eta : etas_) {
            const double t = out[eta.slot] / eta.pivot;
            if (t == 0.0) {
                continue;
            }
            for (const auto& [slot, w] : eta.col) out[slot] -= w * t;
            out[eta.slot] = t;
        }
    }

    // Solve B^T * out = c where c is indexed by basis slot; out by row.
    void btran(std::vector<double>& c, std::vector<double>& out) {
        // Transposed eta file, newest first.
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double acc = c[it->slot] / it->pivot;
            for (const auto& [slot, w] : it->col) {
                if (slot != it->slot) acc -= (w / it->pivot) * c[slot];
            }
            c[it->slot] = acc;
        }
        // U^T solve in factor order: z_k = (c[slot_k] - sum_{k'<k} U[k',k] z_k') / diag.
        std::vector<double>& z = work2_;
        for (int k = 0; k < m_; ++k) {
            double acc = c[slot_of_pos_[k]];
            for (const auto& [kk, coef] : ucols_[k]) acc -= coef * z[kk];
            z[k] = acc / updiag_[k];
        }
        // L^T solve in reverse factor order, result lands on rows.
        std::fill(out.begin(), out.end(), 0.0);
        for (int k = 0; k < m_; ++k) out[pivot_row_of_[k]] = z[k];
        for (int k = m_ - 1; k >= 0; --k) {
            double acc = out[pivot_row_of_[k]];
            for (const auto& [r, mult] : lcols_[k]) acc -= mult * out[r];
            out[pivot_row_of_[k]] = acc;
        }
    }

    void compute_basic_values() {
        std::vector<double> v(m_, 0.0);
        for (int i = 0; i < m_; ++i) v[i] = rhs_[i];
        for (int j = 0; j < n_ + m_; ++j) {
            if (vstat_[j] == VStat::Basic) continue;
            const double xj = xval_[j];
            if (xj == 0.0) continue;
            for_col(j, [&](int r, double coef) { v[r] -= coef * xj; });
        }
        std::vector<double> out(m_, 0.0);
        ftran(v, out);
        for (int s = 0; s < m_; ++s) {
            xb_[s] = out[s];
            xval_[basic_var_[s]] = out[s];
        }
        rescan_feasibility();
    }

    void rescan_feasibility() {
        n_infeasible_ = 0;
        for (int s = 0; s < m_; ++s) {
            const int j = basic_var_[s];
            if (xb_[s] > true_ub(j) + cfg_.feas_tol)
                viol_[s] = 1;
            else if (xb_[s] < true_lb(j) - cfg_.feas_tol)
                viol_[s] = -1;
            else
                viol_[s] = 0;
            if (viol_[s] != 0) ++n_infeasible_;
        }
    }

    void refresh() {
        factorize();
        compute_basic_values();
    }

    // ---- the simplex loop ----

    LpStatus run() {
        const long iter_cap = static_cast<long>(cfg_.iteration_limit_factor) * (m_ + n_);
        const long degen_cap = static_cast<long>(cfg_.degenerate_limit_factor) * m_;
        phase1_ = n_infeasible_ > 0;
        std::vector<double> cslot(m_), y(m_), colbuf(m_), w(m_);
        std::vector<int> wnz;

        while (true) {
            if (iterations_ >= iter_cap) {
                log_error("simplex iteration cap reached (" + std::to_string(iterations_) + ")");
                return LpStatus::IterationLimit;
            }
            if (!bland_ && degenerate_pivots_ >= degen_cap) {
                bland_ = true;
                log_debug("switching to Bland's rule after " +
                          std::to_string(degenerate_pivots_) + " degenerate pivots");
            }
            if (phase1_ && n_infeasible_ == 0) phase1_ = false;
            if (!phase1_ && n_infeasible_ > 0) phase1_ = true; // refactor drift

            // Price: y = B^-T c_B with phase-appropriate costs.
            for (int s = 0; s < m_; ++s) {
                const int j = basic_var_[s];
                cslot[s] = phase1_ ? static_cast<double>(viol_[s])
                                   : (j < n_ ? cost_[j] : 0.0);
            }
            btran(cslot, y);

            // Entering column.
            int q = -1;
            double best = 0.0;
            double d_enter = 0.0;
            const double tol = cfg_.opt_tol;
            for (int j = 0; j < n_ + m_; ++j) {
                if (vstat_[j] == VStat::Basic) continue;
                const double lo = true_lb(j), hi = true_ub(j);
                if (lo == hi) continue; // fixed
                double d = phase1_ ? 0.0 : (j < n_ ? cost_[j] : 0.0);
                if (j < n_) {
                    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
                        d -= y[col_row_[p]] * col_val_[p];
                } else {
                    d -= y[j - n_];
                }
                double score = 0.0;
                const bool is_free = !std::isfinite(lo) && !std::isfinite(hi);
                if (is_free && std::abs(d) > tol)
                    score = std::abs(d);
                else if (!is_free && vstat_[j] == VStat::AtLower && d < -tol)
                    score = -d;
                else if (!is_free && vstat_[j] == VStat::AtUpper && d > tol)
                    score = d;
                else
                    continue;
                if (bland_) {
                    q = j;
                    d_enter = d;
                    break;
                }
                if (score > best) {
                    best = score;
                    q = j;
                    d_enter = d;
                }
            }
            if (q < 0) {
                if (phase1_ || n_infeasible_ > 0) return LpStatus::Infeasible;
                return LpStatus::Optimal;
            }

            // Direction: sigma=+1 rising off the lower bound, -1 off the
            // upper; free columns move against their reduced cost.
            double sigma;
            if (!std::isfinite(true_lb(q)) && !std::isfinite(true_ub(q)))
                sigma = d_enter < 0 ? 1.0 : -1.0;
            else
                sigma = vstat_[q] == VStat::AtLower ? 1.0 : -1.0;

            // w = B^-1 a_q
            std::fill(colbuf.begin(), colbuf.end(), 0.0);
            for_col(q, [&](int r, double v) { colbuf[r] += v; });
            ftran(colbuf, w);
            wnz.clear();
            for (int s = 0; s < m_; ++s)
                if (std::abs(w[s]) > 1e-11) wnz.push_back(s);

            // Ratio test against working bounds (violated bounds are relaxed
            // on the infeasible side, so phase-1 variables drive to their
            // nearest true bound and stop there).
            double theta = kInf;
            int leave_slot = -1;
            double leave_bound = 0.0;
            bool leave_at_upper = false;
            for (int s : wnz) {
                const double a = sigma * w[s];
                if (std::abs(a) <= cfg_.pivot_tol) continue;
                const int j = basic_var_[s];
                double bound, t;
                bool at_upper;
                if (a > 0) { // basic value decreases
                    bound = viol_[s] == -1 ? -kInf : true_lb(j);
                    if (viol_[s] == 1) bound = true_ub(j); // approaching from above
                    if (!std::isfinite(bound)) continue;
                    t = (xb_[s] - bound) / a;
                    at_upper = viol_[s] == 1;
                } else { // basic value increases
                    bound = viol_[s] == 1 ? kInf : true_ub(j);
                    if (viol_[s] == -1) bound = true_lb(j); // approaching from below
                    if (!std::isfinite(bound)) continue;
                    t = (xb_[s] - bound) / a;
                    at_upper = viol_[s] != -1;
                }
                if (t < 0) t = 0;
                const bool better =
                    t < theta - 1e-10 ||
                    (t < theta + 1e-10 && leave_slot >= 0 &&
                     (bland_ ? basic_var_[s] < basic_var_[leave_slot]
                             : std::abs(w[s]) > std::abs(w[leave_slot])));
                if (leave_slot < 0 ? t < theta : better) {
                    theta = t;
                    leave_slot = s;
                    leave_bound = bound;
                    leave_at_upper = at_upper;
                }
            }
            const double range_q = true_ub(q) - true_lb(q);
            if (range_q <= theta) {
                // Bound flip, no basis change.
                theta = range_q;
                if (!std::isfinite(theta)) return phase1_ ? LpStatus::Infeasible
                                                          : LpStatus::Unbounded;
                apply_step(q, sigma, theta, w, wnz);
                xval_[q] = vstat_[q] == VStat::AtLower ? true_ub(q) : true_lb(q);
                vstat_[q] = vstat_[q] == VStat::AtLower ? VStat::AtUpper : VStat::AtLower;
                ++iterations_;
                if (theta <= 1e-12) ++degenerate_pivots_;
                continue;
            }
            if (leave_slot < 0) {
                // No blocking row and no opposite bound.
                return phase1_ ? LpStatus::Infeasible : LpStatus::Unbounded;
            }

            // Refactor-and-retry once when the pivot looks unstable.
            if (std::abs(w[leave_slot]) < 1e-7 && !etas_.empty()) {
                refresh();
                continue;
            }

            apply_step(q, sigma, theta, w, wnz);

            const int leaving = basic_var_[leave_slot];
            xval_[leaving] = leave_bound;
            vstat_[leaving] = leave_at_upper ? VStat::AtUpper : VStat::AtLower;
            if (viol_[leave_slot] != 0) {
                viol_[leave_slot] = 0;
                --n_infeasible_;
            }

            const double enter_val = xval_[q] + sigma * theta;
            basic_var_[leave_slot] = q;
            vstat_[q] = VStat::Basic;
            xb_[leave_slot] = enter_val;
            xval_[q] = enter_val;

            Eta eta;
            eta.slot = leave_slot;
            eta.pivot = w[leave_slot];
            eta.col.reserve(wnz.size());
            for (int s : wnz) eta.col.emplace_back(s, w[s]);
            etas_.push_back(std::move(eta));

            ++iterations_;
            if (theta <= 1e-12) ++degenerate_pivots_;

            if (static_cast<int>(etas_.size()) >= cfg_.refactor_interval) refresh();
        }
    }

    // Moves the entering variable by theta and updates basic values and
    // feasibility flags along the way.
    void apply_step(int /*q*/, double sigma, double theta,
                    const std::vector<double>& w, const std::vector<int>& wnz) {
        if (theta == 0.0) return;
        for (int s : wnz) {
            xb_[s] -= sigma * theta * w[s];
            xval_[basic_var_[s]] = xb_[s];
            const int j = basic_var_[s];
            signed char v = 0;
            if (xb_[s] > true_ub(j) + cfg_.feas_tol)
                v = 1;
            else if (xb_[s] < true_lb(j) - cfg_.feas_tol)
                v = -1;
            if (v != viol_[s]) {
                if (viol_[s] != 0 && v == 0) --n_infeasible_;
                if (viol_[s] == 0 && v != 0) ++n_infeasible_;
                viol_[s] = v;
            }
        }
    }

    std::vector<double> structural_values() const {
        std::vector<double> x(n_);
        for (int j = 0; j < n_; ++j) x[j] = xval_[j];
        return x;
    }
};

// Solves the LP relaxation of a model (binaries already carry [0,1] bounds).
inline LpSolution solve_lp(const MilpModel& model, const SolverConfig& cfg = {}) {
    BoundedSimplex simplex(model);
    return simplex.solve(cfg);
}

} // namespace nemdv
