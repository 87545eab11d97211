#pragma once

// Self-contained linear-programming core: a bounded-variable revised simplex
// returning primal-dual certificates. Rows carry senses (<=, =, >=) and name
// tags so callers can pull shadow prices of specific constraints.
//
// Dual convention (asserted project-wide): y_r is the shadow price
// dObjective/dRHS_r of a minimization. Rows with >= sense have y >= 0, rows
// with <= sense have y <= 0, equality rows are free.
//
// The basis is factorized with Eigen's SparseLU and kept current between
// refactorizations through product-form eta updates.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "mgsched/common.hpp"

namespace mgsched {

enum class RowSense : char { LE = 'L', EQ = 'E', GE = 'G' };
enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration_limit";
        case LpStatus::NumericalFailure: return "numerical_failure";
    }
    return "?";
}

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinearProgram {
    struct Entry {
        int row;
        int col;
        double val;
    };

    std::vector<double> cost, lb, ub;
    std::vector<std::string> col_name;
    std::vector<RowSense> sense;
    std::vector<double> rhs;
    std::vector<std::string> row_name;
    std::vector<Entry> entries;

    int num_cols() const { return static_cast<int>(cost.size()); }
    int num_rows() const { return static_cast<int>(rhs.size()); }

    int add_col(std::string name, double lower, double upper, double obj) {
        const int id = num_cols();
        col_name.push_back(std::move(name));
        lb.push_back(lower);
        ub.push_back(upper);
        cost.push_back(obj);
        col_by_name_.emplace(col_name.back(), id);
        return id;
    }

    int add_row(std::string name, RowSense s, double right) {
        const int id = num_rows();
        row_name.push_back(std::move(name));
        sense.push_back(s);
        rhs.push_back(right);
        row_by_name_.emplace(row_name.back(), id);
        return id;
    }

    void add_entry(int row, int col, double val) {
        if (val == 0.0) return;
        entries.push_back({row, col, val});
    }

    int row_index(const std::string& name) const {
        auto it = row_by_name_.find(name);
        return it == row_by_name_.end() ? -1 : it->second;
    }
    int col_index(const std::string& name) const {
        auto it = col_by_name_.find(name);
        return it == col_by_name_.end() ? -1 : it->second;
    }

    void validate() const {
        for (int j = 0; j < num_cols(); ++j) {
            if (!std::isfinite(cost[static_cast<size_t>(j)]))
                throw SolverError("lp: objective coefficient not finite for " + col_name[static_cast<size_t>(j)]);
            if (std::isnan(lb[static_cast<size_t>(j)]) || std::isnan(ub[static_cast<size_t>(j)]))
                throw SolverError("lp: NaN bound on " + col_name[static_cast<size_t>(j)]);
            if (lb[static_cast<size_t>(j)] > ub[static_cast<size_t>(j)])
                throw SolverError("lp: empty bound interval on " + col_name[static_cast<size_t>(j)]);
        }
        for (int r = 0; r < num_rows(); ++r)
            if (!std::isfinite(rhs[static_cast<size_t>(r)]))
                throw SolverError("lp: rhs not finite for " + row_name[static_cast<size_t>(r)]);
        for (const auto& e : entries) {
            if (e.row < 0 || e.row >= num_rows() || e.col < 0 || e.col >= num_cols())
                throw SolverError("lp: entry index out of range");
            if (!std::isfinite(e.val)) throw SolverError("lp: entry value not finite");
        }
    }

    /// Plain-text fixed format, one constraint per line, for golden files.
    void dump(std::ostream& os) const {
        os << "LP cols=" << num_cols() << " rows=" << num_rows() << '\n';
        for (int j = 0; j < num_cols(); ++j)
            if (cost[static_cast<size_t>(j)] != 0.0)
                os << "OBJ " << col_name[static_cast<size_t>(j)] << ' ' << fmt_num(cost[static_cast<size_t>(j)]) << '\n';
        for (int j = 0; j < num_cols(); ++j)
            os << "COL " << col_name[static_cast<size_t>(j)] << ' ' << fmt_num(lb[static_cast<size_t>(j)]) << ' '
               << fmt_num(ub[static_cast<size_t>(j)]) << '\n';
        // Entries gathered row-wise in insertion order.
        std::vector<std::vector<std::pair<int, double>>> rows(static_cast<size_t>(num_rows()));
        for (const auto& e : entries) rows[static_cast<size_t>(e.row)].push_back({e.col, e.val});
        for (int r = 0; r < num_rows(); ++r) {
            os << "ROW " << row_name[static_cast<size_t>(r)] << ' ' << static_cast<char>(sense[static_cast<size_t>(r)])
               << ' ' << fmt_num(rhs[static_cast<size_t>(r)]) << " :";
            for (const auto& [c, v] : rows[static_cast<size_t>(r)])
                os << ' ' << col_name[static_cast<size_t>(c)] << ' ' << fmt_num(v);
            os << '\n';
        }
    }

private:
    std::unordered_map<std::string, int> row_by_name_, col_by_name_;
};

struct PrimalDualSolution {
    LpStatus status = LpStatus::NumericalFailure;
    std::vector<double> x;             // structural values
    std::vector<double> y;             // row duals (shadow prices)
    std::vector<double> reduced_cost;  // structural reduced costs
    double objective = std::numeric_limits<double>::quiet_NaN();
    double dual_objective = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> ray;  // primal ray (unbounded) or row Farkas ray (infeasible)
    long iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double compl_residual = 0.0;

    bool optimal() const { return status == LpStatus::Optimal; }
};

enum class VarState : unsigned char { Basic, AtLower, AtUpper, FreeNB };

/// Variable states over structural columns followed by one slack per row.
struct Basis {
    std::vector<VarState> state;
};

struct SimplexOptions {
    double feas_tol = 1e-7;
    double opt_tol = 1e-7;
    long max_iters = -1;  // default 50*(rows+cols)
    int refactor_every = 100;
    int bland_after = 1000;  // consecutive degenerate pivots
};

namespace detail {

class Simplex {
public:
    Simplex(const LinearProgram& lp, const SimplexOptions& opts) : lp_(lp), opts_(opts) {
        m_ = lp.num_rows();
        n_ = lp.num_cols();
        N_ = n_ + m_;
        build_columns();
        cost_.assign(static_cast<size_t>(N_), 0.0);
        lb_.assign(static_cast<size_t>(N_), 0.0);
        ub_.assign(static_cast<size_t>(N_), 0.0);
        for (int j = 0; j < n_; ++j) {
            cost_[static_cast<size_t>(j)] = lp.cost[static_cast<size_t>(j)];
            lb_[static_cast<size_t>(j)] = lp.lb[static_cast<size_t>(j)];
            ub_[static_cast<size_t>(j)] = lp.ub[static_cast<size_t>(j)];
        }
        for (int r = 0; r < m_; ++r) {
            const int j = n_ + r;
            switch (lp.sense[static_cast<size_t>(r)]) {
                case RowSense::LE:
                    lb_[static_cast<size_t>(j)] = 0.0;
                    ub_[static_cast<size_t>(j)] = kInf;
                    break;
                case RowSense::GE:
                    lb_[static_cast<size_t>(j)] = -kInf;
                    ub_[static_cast<size_t>(j)] = 0.0;
                    break;
                case RowSense::EQ:
                    lb_[static_cast<size_t>(j)] = 0.0;
                    ub_[static_cast<size_t>(j)] = 0.0;
                    break;
            }
        }
        if (opts_.max_iters < 0) opts_.max_iters = 50L * (m_ + N_);
    }

    PrimalDualSolution run(Basis* warm) {
        PrimalDualSolution sol;
        init_basis(warm);
        if (!refactorize()) {
            reset_to_slack_basis();
            if (!refactorize()) {
                sol.status = LpStatus::NumericalFailure;
                return sol;
            }
        }
        compute_basic_values();

        long iters = 0;
        int degenerate_run = 0;
        bool bland = false;
        int pivots_since_refactor = 0;
        int refactor_retries = 0;
        bool phase_one = total_infeasibility() > infeas_stop_tol();

        while (true) {
            if (iters >= opts_.max_iters) {
                finalize(sol, LpStatus::IterationLimit);
                sol.iterations = iters;
                return sol;
            }
            if (pivots_since_refactor >= opts_.refactor_every) {
                if (!refactorize()) {
                    sol.status = LpStatus::NumericalFailure;
                    sol.iterations = iters;
                    return sol;
                }
                compute_basic_values();
                pivots_since_refactor = 0;
            }
            if (phase_one && total_infeasibility() <= infeas_stop_tol()) phase_one = false;

            // Duals for the active cost vector.
            Eigen::VectorXd y = btran(active_cost_basic(phase_one));

            // Pricing.
            int q = -1;
            double best_score = 0.0;
            int dir = 0;
            for (int j = 0; j < N_; ++j) {
                if (state_[static_cast<size_t>(j)] == VarState::Basic) continue;
                if (lb_[static_cast<size_t>(j)] == ub_[static_cast<size_t>(j)]) continue;  // fixed
                const double cj = phase_one ? 0.0 : cost_[static_cast<size_t>(j)];
                const double dj = cj - col_dot(j, y);
                const double tol = opts_.opt_tol * (1.0 + std::abs(cj));
                double score = 0.0;
                int d = 0;
                switch (state_[static_cast<size_t>(j)]) {
                    case VarState::AtLower:
                        if (dj < -tol) {
                            score = -dj;
                            d = +1;
                        }
                        break;
                    case VarState::AtUpper:
                        if (dj > tol) {
                            score = dj;
                            d = -1;
                        }
                        break;
                    case VarState::FreeNB:
                        if (std::abs(dj) > tol) {
                            score = std::abs(dj);
                            d = dj < 0 ? +1 : -1;
                        }
                        break;
                    case VarState::Basic: break;
                }
                if (d == 0) continue;
                if (bland) {
                    q = j;
                    dir = d;
                    break;  // smallest index rule
                }
                if (score > best_score + 1e-15) {
                    best_score = score;
                    q = j;
                    dir = d;
                }
            }

            if (q < 0) {
                if (phase_one || total_infeasibility() > infeas_stop_tol()) {
                    // Phase-1 optimum with residual infeasibility.
                    if (total_infeasibility() > infeas_stop_tol()) {
                        finalize_infeasible(sol, btran(active_cost_basic(true)));
                        sol.iterations = iters;
                        return sol;
                    }
                    phase_one = false;
                    continue;
                }
                finalize(sol, LpStatus::Optimal);
                sol.iterations = iters;
                return sol;
            }

            // Direction through the basis.
            Eigen::VectorXd w = ftran(column_dense(q));

            // Ratio test.
            const double big = kInf;
            double t_star = big;
            int leave_pos = -1;
            double leave_target = 0.0;
            const double flip_len = (std::isfinite(lb_[static_cast<size_t>(q)]) && std::isfinite(ub_[static_cast<size_t>(q)]))
                                        ? ub_[static_cast<size_t>(q)] - lb_[static_cast<size_t>(q)]
                                        : big;

            for (int p = 0; p < m_; ++p) {
                const double wp = w[p];
                if (std::abs(wp) < 1e-11) continue;
                const int i = basic_[static_cast<size_t>(p)];
                const double delta = -dir * wp;  // dx_i per unit step
                const double xi = x_[static_cast<size_t>(i)];
                const double li = lb_[static_cast<size_t>(i)];
                const double ui = ub_[static_cast<size_t>(i)];
                double target = 0.0;
                bool blocking = false;
                const double ftol = opts_.feas_tol * (1.0 + std::abs(xi));
                if (phase_one && xi < li - ftol) {
                    if (delta > 0) {
                        target = li;
                        blocking = true;
                    }
                } else if (phase_one && xi > ui + ftol) {
                    if (delta < 0) {
                        target = ui;
                        blocking = true;
                    }
                } else {
                    if (delta > 0 && std::isfinite(ui)) {
                        target = ui;
                        blocking = true;
                    } else if (delta < 0 && std::isfinite(li)) {
                        target = li;
                        blocking = true;
                    }
                }
                if (!blocking) continue;
                double t = (target - xi) / delta;
                if (t < 0) t = 0;
                const double t_eps = 1e-9 * (1.0 + std::abs(t_star));
                if (t < t_star - t_eps) {
                    t_star = t;
                    leave_pos = p;
                    leave_target = target;
                } else if (t <= t_star + t_eps && leave_pos >= 0) {
                    if (bland) {
                        if (i < basic_[static_cast<size_t>(leave_pos)]) {
                            leave_pos = p;
                            leave_target = target;
                            t_star = std::min(t_star, t);
                        }
                    } else if (std::abs(wp) > std::abs(w[leave_pos]) + 1e-12) {
                        leave_pos = p;
                        leave_target = target;
                        t_star = std::min(t_star, t);
                    }
                }
            }

            const bool flip_wins = flip_len < t_star;
            if (leave_pos < 0 && !std::isfinite(flip_len)) {
                if (phase_one) {
                    sol.status = LpStatus::NumericalFailure;  // cannot happen with exact data
                    sol.iterations = iters;
                    return sol;
                }
                finalize_unbounded(sol, q, dir, w);
                sol.iterations = iters;
                return sol;
            }

            double step = flip_wins ? flip_len : t_star;
            if (!flip_wins && std::abs(w[leave_pos]) < 1e-9) {
                // Unacceptably small pivot: refresh the factorization once and
                // retry the iteration; give up after repeated failures.
                if (refactor_retries++ < 3) {
                    if (!refactorize()) {
                        sol.status = LpStatus::NumericalFailure;
                        sol.iterations = iters;
                        return sol;
                    }
                    compute_basic_values();
                    pivots_since_refactor = 0;
                    continue;
                }
                sol.status = LpStatus::NumericalFailure;
                sol.iterations = iters;
                return sol;
            }
            refactor_retries = 0;

            // Apply the step.
            x_[static_cast<size_t>(q)] += dir * step;
            for (int p = 0; p < m_; ++p) {
                if (w[p] == 0.0) continue;
                const int i = basic_[static_cast<size_t>(p)];
                x_[static_cast<size_t>(i)] -= dir * step * w[p];
            }

            if (flip_wins) {
                state_[static_cast<size_t>(q)] =
                    state_[static_cast<size_t>(q)] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
                x_[static_cast<size_t>(q)] = state_[static_cast<size_t>(q)] == VarState::AtLower
                                                 ? lb_[static_cast<size_t>(q)]
                                                 : ub_[static_cast<size_t>(q)];
            } else {
                const int leaving = basic_[static_cast<size_t>(leave_pos)];
                x_[static_cast<size_t>(leaving)] = leave_target;
                state_[static_cast<size_t>(leaving)] = (leave_target == ub_[static_cast<size_t>(leaving)] &&
                                                        lb_[static_cast<size_t>(leaving)] != ub_[static_cast<size_t>(leaving)])
                                                           ? VarState::AtUpper
                                                           : VarState::AtLower;
                state_[static_cast<size_t>(q)] = VarState::Basic;
                basic_[static_cast<size_t>(leave_pos)] = q;
                pos_of_[static_cast<size_t>(leaving)] = -1;
                pos_of_[static_cast<size_t>(q)] = leave_pos;
                push_eta(leave_pos, w);
                ++pivots_since_refactor;
            }

            ++iters;
            if (step <= 1e-10) {
                if (++degenerate_run >= opts_.bland_after) bland = true;
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
    }

private:
    // --- problem data -----------------------------------------------------
    const LinearProgram& lp_;
    SimplexOptions opts_;
    int m_ = 0, n_ = 0, N_ = 0;
    std::vector<int> col_start_, col_row_;
    std::vector<double> col_val_;
    std::vector<double> cost_, lb_, ub_;

    // --- simplex state ----------------------------------------------------
    std::vector<int> basic_;      // column in each basis position
    std::vector<int> pos_of_;     // basis position per column, -1 if nonbasic
    std::vector<VarState> state_;
    std::vector<double> x_;

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    struct Eta {
        int r;
        double pivot;
        std::vector<std::pair<int, double>> nz;  // excludes position r
    };
    std::vector<Eta> etas_;

    void build_columns() {
        std::vector<int> count(static_cast<size_t>(N_), 0);
        for (const auto& e : lp_.entries) ++count[static_cast<size_t>(e.col)];
        for (int r = 0; r < m_; ++r) count[static_cast<size_t>(n_ + r)] = 1;
        col_start_.assign(static_cast<size_t>(N_) + 1, 0);
        for (int j = 0; j < N_; ++j) col_start_[static_cast<size_t>(j) + 1] = col_start_[static_cast<size_t>(j)] + count[static_cast<size_t>(j)];
        col_row_.assign(static_cast<size_t>(col_start_[static_cast<size_t>(N_)]), 0);
        col_val_.assign(col_row_.size(), 0.0);
        std::vector<int> fill(static_cast<size_t>(N_), 0);
        for (const auto& e : lp_.entries) {
            const int at = col_start_[static_cast<size_t>(e.col)] + fill[static_cast<size_t>(e.col)]++;
            col_row_[static_cast<size_t>(at)] = e.row;
            col_val_[static_cast<size_t>(at)] = e.val;
        }
        for (int r = 0; r < m_; ++r) {
            const int j = n_ + r;
            const int at = col_start_[static_cast<size_t>(j)] + fill[static_cast<size_t>(j)]++;
            col_row_[static_cast<size_t>(at)] = r;
            col_val_[static_cast<size_t>(at)] = 1.0;
        }
        // Merge duplicate entries within a column.
        for (int j = 0; j < n_; ++j) {
            const int b = col_start_[static_cast<size_t>(j)], e = col_start_[static_cast<size_t>(j) + 1];
            if (e - b < 2) continue;
            std::vector<std::pair<int, double>> tmp;
            tmp.reserve(static_cast<size_t>(e - b));
            for (int k = b; k < e; ++k) tmp.push_back({col_row_[static_cast<size_t>(k)], col_val_[static_cast<size_t>(k)]});
            std::sort(tmp.begin(), tmp.end());
            int out = b;
            for (size_t k = 0; k < tmp.size();) {
                double v = tmp[k].second;
                size_t k2 = k + 1;
                while (k2 < tmp.size() && tmp[k2].first == tmp[k].first) v += tmp[k2++].second;
                col_row_[static_cast<size_t>(out)] = tmp[k].first;
                col_val_[static_cast<size_t>(out)] = v;
                ++out;
                k = k2;
            }
            // Zero-pad any removed duplicates.
            for (int k = out; k < e; ++k) {
                col_row_[static_cast<size_t>(k)] = col_row_[static_cast<size_t>(out - 1)];
                col_val_[static_cast<size_t>(k)] = 0.0;
            }
        }
    }

    double col_dot(int j, const Eigen::VectorXd& y) const {
        double acc = 0.0;
        for (int k = col_start_[static_cast<size_t>(j)]; k < col_start_[static_cast<size_t>(j) + 1]; ++k)
            acc += col_val_[static_cast<size_t>(k)] * y[col_row_[static_cast<size_t>(k)]];
        return acc;
    }

    Eigen::VectorXd column_dense(int j) const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(m_);
        for (int k = col_start_[static_cast<size_t>(j)]; k < col_start_[static_cast<size_t>(j) + 1]; ++k)
            v[col_row_[static_cast<size_t>(k)]] += col_val_[static_cast<size_t>(k)];
        return v;
    }

    void init_basis(Basis* warm) {
        state_.assign(static_cast<size_t>(N_), VarState::AtLower);
        if (warm && static_cast<int>(warm->state.size()) == N_) {
            int basics = 0;
            for (auto s : warm->state) basics += s == VarState::Basic ? 1 : 0;
            if (basics == m_) {
                state_ = warm->state;
                rebuild_basic_lists();
                set_nonbasic_values();
                return;
            }
        }
        reset_to_slack_basis();
    }

    void reset_to_slack_basis() {
        state_.assign(static_cast<size_t>(N_), VarState::AtLower);
        for (int j = 0; j < n_; ++j) state_[static_cast<size_t>(j)] = default_nonbasic_state(j);
        for (int r = 0; r < m_; ++r) state_[static_cast<size_t>(n_ + r)] = VarState::Basic;
        etas_.clear();
        rebuild_basic_lists();
        set_nonbasic_values();
    }

    VarState default_nonbasic_state(int j) const {
        const double l = lb_[static_cast<size_t>(j)], u = ub_[static_cast<size_t>(j)];
        if (std::isfinite(l)) return VarState::AtLower;
        if (std::isfinite(u)) return VarState::AtUpper;
        return VarState::FreeNB;
    }

    void rebuild_basic_lists() {
        basic_.clear();
        pos_of_.assign(static_cast<size_t>(N_), -1);
        for (int j = 0; j < N_; ++j)
            if (state_[static_cast<size_t>(j)] == VarState::Basic) {
                pos_of_[static_cast<size_t>(j)] = static_cast<int>(basic_.size());
                basic_.push_back(j);
            }
    }

    void set_nonbasic_values() {
        x_.assign(static_cast<size_t>(N_), 0.0);
        for (int j = 0; j < N_; ++j) {
            switch (state_[static_cast<size_t>(j)]) {
                case VarState::AtLower: x_[static_cast<size_t>(j)] = std::isfinite(lb_[static_cast<size_t>(j)]) ? lb_[static_cast<size_t>(j)] : 0.0; break;
                case VarState::AtUpper: x_[static_cast<size_t>(j)] = std::isfinite(ub_[static_cast<size_t>(j)]) ? ub_[static_cast<size_t>(j)] : 0.0; break;
                case VarState::FreeNB: x_[static_cast<size_t>(j)] = 0.0; break;
                case VarState::Basic: break;
            }
        }
    }

    bool refactorize() {
        if (static_cast<int>(basic_.size()) != m_) return false;
        Eigen::SparseMatrix<double> B(m_, m_);
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<size_t>(m_) * 4);
        for (int p = 0; p < m_; ++p) {
            const int j = basic_[static_cast<size_t>(p)];
            for (int k = col_start_[static_cast<size_t>(j)]; k < col_start_[static_cast<size_t>(j) + 1]; ++k)
                if (col_val_[static_cast<size_t>(k)] != 0.0)
                    trips.emplace_back(col_row_[static_cast<size_t>(k)], p, col_val_[static_cast<size_t>(k)]);
        }
        B.setFromTriplets(trips.begin(), trips.end());
        lu_.analyzePattern(B);
        lu_.factorize(B);
        etas_.clear();
        return lu_.info() == Eigen::Success;
    }

    void compute_basic_values() {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
        for (int r = 0; r < m_; ++r) rhs[r] = lp_.rhs[static_cast<size_t>(r)];
        for (int j = 0; j < N_; ++j) {
            if (state_[static_cast<size_t>(j)] == VarState::Basic) continue;
            const double xj = x_[static_cast<size_t>(j)];
            if (xj == 0.0) continue;
            for (int k = col_start_[static_cast<size_t>(j)]; k < col_start_[static_cast<size_t>(j) + 1]; ++k)
                rhs[col_row_[static_cast<size_t>(k)]] -= col_val_[static_cast<size_t>(k)] * xj;
        }
        Eigen::VectorXd xb = ftran(rhs);
        for (int p = 0; p < m_; ++p) x_[static_cast<size_t>(basic_[static_cast<size_t>(p)])] = xb[p];
    }

    Eigen::VectorXd ftran(Eigen::VectorXd v) const {
        Eigen::VectorXd out = lu_.solve(v);
        for (const auto& e : etas_) {
            const double zr = out[e.r] / e.pivot;
            if (zr != 0.0)
                for (const auto& [i, val] : e.nz) out[i] -= val * zr;
            out[e.r] = zr;
        }
        return out;
    }

    Eigen::VectorXd btran(Eigen::VectorXd c) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double s = 0.0;
            for (const auto& [i, val] : it->nz) s += val * c[i];
            c[it->r] = (c[it->r] - s) / it->pivot;
        }
        return lu_.adjoint().solve(c);
    }

    void push_eta(int r, const Eigen::VectorXd& w) {
        Eta e;
        e.r = r;
        e.pivot = w[r];
        for (int i = 0; i < m_; ++i)
            if (i != r && std::abs(w[i]) > 1e-13) e.nz.push_back({i, w[i]});
        etas_.push_back(std::move(e));
    }

    double infeas_stop_tol() const { return opts_.feas_tol; }

    double total_infeasibility() const {
        double acc = 0.0;
        for (int p = 0; p < m_; ++p) {
            const int i = basic_[static_cast<size_t>(p)];
            const double xi = x_[static_cast<size_t>(i)];
            const double ftol = opts_.feas_tol * (1.0 + std::abs(xi));
            if (xi < lb_[static_cast<size_t>(i)] - ftol) acc += lb_[static_cast<size_t>(i)] - xi;
            else if (xi > ub_[static_cast<size_t>(i)] + ftol) acc += xi - ub_[static_cast<size_t>(i)];
        }
        return acc;
    }

    Eigen::VectorXd active_cost_basic(bool phase_one) const {
        Eigen::VectorXd cb = Eigen::VectorXd::Zero(m_);
        for (int p = 0; p < m_; ++p) {
            const int i = basic_[static_cast<size_t>(p)];
            if (phase_one) {
                const double xi = x_[static_cast<size_t>(i)];
                const double ftol = opts_.feas_tol * (1.0 + std::abs(xi));
                if (xi < lb_[static_cast<size_t>(i)] - ftol) cb[p] = -1.0;
                else if (xi > ub_[static_cast<size_t>(i)] + ftol) cb[p] = 1.0;
            } else {
                cb[p] = cost_[static_cast<size_t>(i)];
            }
        }
        return cb;
    }

    void finalize(PrimalDualSolution& sol, LpStatus status) {
        // Clean refactorization for accurate certificates.
        if (refactorize()) compute_basic_values();
        Eigen::VectorXd y = btran(active_cost_basic(false));
        sol.status = status;
        sol.x.assign(lp_.cost.size(), 0.0);
        for (int j = 0; j < n_; ++j) sol.x[static_cast<size_t>(j)] = x_[static_cast<size_t>(j)];
        sol.y.assign(static_cast<size_t>(m_), 0.0);
        for (int r = 0; r < m_; ++r) sol.y[static_cast<size_t>(r)] = y[r];
        sol.reduced_cost.assign(static_cast<size_t>(n_), 0.0);
        double dual_obj = 0.0;
        for (int r = 0; r < m_; ++r) dual_obj += y[r] * lp_.rhs[static_cast<size_t>(r)];
        for (int j = 0; j < n_; ++j) {
            const double dj = cost_[static_cast<size_t>(j)] - col_dot(j, y);
            sol.reduced_cost[static_cast<size_t>(j)] = dj;
            if (state_[static_cast<size_t>(j)] != VarState::Basic) dual_obj += dj * x_[static_cast<size_t>(j)];
        }
        sol.dual_objective = dual_obj;
        double obj = 0.0;
        for (int j = 0; j < n_; ++j) obj += cost_[static_cast<size_t>(j)] * x_[static_cast<size_t>(j)];
        sol.objective = obj;
        compute_residuals(sol, y);
    }

    void finalize_infeasible(PrimalDualSolution& sol, const Eigen::VectorXd& farkas) {
        sol.status = LpStatus::Infeasible;
        sol.x.assign(lp_.cost.size(), 0.0);
        for (int j = 0; j < n_; ++j) sol.x[static_cast<size_t>(j)] = x_[static_cast<size_t>(j)];
        sol.ray.assign(static_cast<size_t>(m_), 0.0);
        for (int r = 0; r < m_; ++r) sol.ray[static_cast<size_t>(r)] = farkas[r];
    }

    void finalize_unbounded(PrimalDualSolution& sol, int q, int dir, const Eigen::VectorXd& w) {
        sol.status = LpStatus::Unbounded;
        sol.x.assign(lp_.cost.size(), 0.0);
        for (int j = 0; j < n_; ++j) sol.x[static_cast<size_t>(j)] = x_[static_cast<size_t>(j)];
        sol.ray.assign(static_cast<size_t>(n_), 0.0);
        if (q < n_) sol.ray[static_cast<size_t>(q)] = dir;
        for (int p = 0; p < m_; ++p) {
            const int i = basic_[static_cast<size_t>(p)];
            if (i < n_ && w[p] != 0.0) sol.ray[static_cast<size_t>(i)] = -dir * w[p];
        }
    }

    void compute_residuals(PrimalDualSolution& sol, const Eigen::VectorXd& y) {
        // Primal: row activity vs rhs and bound violations.
        std::vector<double> act(static_cast<size_t>(m_), 0.0);
        for (int j = 0; j < n_; ++j) {
            const double xj = x_[static_cast<size_t>(j)];
            if (xj == 0.0) continue;
            for (int k = col_start_[static_cast<size_t>(j)]; k < col_start_[static_cast<size_t>(j) + 1]; ++k)
                act[static_cast<size_t>(col_row_[static_cast<size_t>(k)])] += col_val_[static_cast<size_t>(k)] * xj;
        }
        double pres = 0.0, compl_res = 0.0;
        for (int r = 0; r < m_; ++r) {
            const double slack = lp_.rhs[static_cast<size_t>(r)] - act[static_cast<size_t>(r)];
            const double scale = 1.0 + std::abs(lp_.rhs[static_cast<size_t>(r)]) + std::abs(act[static_cast<size_t>(r)]);
            switch (lp_.sense[static_cast<size_t>(r)]) {
                case RowSense::LE: pres = std::max(pres, -slack / scale); break;
                case RowSense::GE: pres = std::max(pres, slack / scale); break;
                case RowSense::EQ: pres = std::max(pres, std::abs(slack) / scale); break;
            }
            compl_res = std::max(compl_res, std::abs(y[r] * slack) / scale);
        }
        for (int j = 0; j < n_; ++j) {
            const double xj = x_[static_cast<size_t>(j)];
            const double scale = 1.0 + std::abs(xj);
            if (std::isfinite(lb_[static_cast<size_t>(j)])) pres = std::max(pres, (lb_[static_cast<size_t>(j)] - xj) / scale);
            if (std::isfinite(ub_[static_cast<size_t>(j)])) pres = std::max(pres, (xj - ub_[static_cast<size_t>(j)]) / scale);
        }
        // Dual: sign conditions on reduced costs; basic reduced costs ~ 0.
        double dres = 0.0;
        for (int j = 0; j < n_; ++j) {
            const double dj = sol.reduced_cost[static_cast<size_t>(j)];
            const double scale = 1.0 + std::abs(cost_[static_cast<size_t>(j)]);
            switch (state_[static_cast<size_t>(j)]) {
                case VarState::Basic: dres = std::max(dres, std::abs(dj) / scale); break;
                case VarState::AtLower:
                    if (lb_[static_cast<size_t>(j)] != ub_[static_cast<size_t>(j)]) dres = std::max(dres, -dj / scale);
                    break;
                case VarState::AtUpper:
                    if (lb_[static_cast<size_t>(j)] != ub_[static_cast<size_t>(j)]) dres = std::max(dres, dj / scale);
                    break;
                case VarState::FreeNB: dres = std::max(dres, std::abs(dj) / scale); break;
            }
        }
        // Row dual sign convention.
        for (int r = 0; r < m_; ++r) {
            if (lp_.sense[static_cast<size_t>(r)] == RowSense::LE) dres = std::max(dres, y[r]);
            if (lp_.sense[static_cast<size_t>(r)] == RowSense::GE) dres = std::max(dres, -y[r]);
        }
        sol.primal_residual = pres;
        sol.dual_residual = dres;
        sol.compl_residual = compl_res;
    }

public:
    Basis basis() const { return Basis{state_}; }
};

}  // namespace detail

inline PrimalDualSolution solve_lp(const LinearProgram& lp, Basis* basis_io,
                                   const SimplexOptions& opts = {}) {
    lp.validate();
    detail::Simplex s(lp, opts);
    PrimalDualSolution sol = s.run(basis_io);
    if (basis_io) *basis_io = s.basis();
    return sol;
}

inline PrimalDualSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opts = {}) {
    return solve_lp(lp, nullptr, opts);
}

}  // namespace mgsched
