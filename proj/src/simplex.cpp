#include "interpkit/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace interpkit {

namespace {

constexpr double kEps = 1e-9;

// Standard-form tableau: rows m, structural + slack/artificial columns.
// Basis maintained explicitly; Bland's rule guarantees termination.
class Tableau {
public:
    Tableau(int m, int n) : m_(m), n_(n), a_(m, std::vector<double>(n + 1, 0.0)), basis_(m, -1) {}

    std::vector<std::vector<double>> a_;  // m rows, n cols + rhs at index n
    std::vector<int> basis_;
    int m_, n_;

    // minimize cost.x over current feasible tableau; returns false if unbounded
    bool optimize(const std::vector<double>& cost, const std::vector<bool>& allowed) {
        std::vector<double> red(n_ + 1);
        for (;;) {
            // reduced costs: red = cost - cost_B . A
            for (int j = 0; j <= n_; ++j) red[j] = (j < n_) ? cost[j] : 0.0;
            for (int i = 0; i < m_; ++i) {
                double cb = cost[basis_[i]];
                if (cb == 0.0) continue;
                for (int j = 0; j <= n_; ++j) red[j] -= cb * a_[i][j];
            }
            int enter = -1;
            for (int j = 0; j < n_; ++j) {
                if (allowed[j] && red[j] < -kEps) {
                    enter = j;  // Bland: smallest index
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                if (a_[i][enter] > kEps) {
                    double ratio = a_[i][n_] / a_[i][enter];
                    if (ratio < best - kEps ||
                        (ratio < best + kEps && (leave < 0 || basis_[i] < basis_[leave]))) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    }

    void pivot(int row, int col) {
        double p = a_[row][col];
        for (int j = 0; j <= n_; ++j) a_[row][j] /= p;
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            double f = a_[i][col];
            if (f == 0.0) continue;
            for (int j = 0; j <= n_; ++j) a_[i][j] -= f * a_[row][j];
        }
        basis_[row] = col;
    }
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
    const int n = lp.num_vars;
    const int m = static_cast<int>(lp.rows.size());
    if (static_cast<int>(lp.c.size()) != n) {
        throw std::invalid_argument("solve_lp: objective length mismatch");
    }
    for (const auto& r : lp.rows) {
        if (static_cast<int>(r.a.size()) != n) {
            throw std::invalid_argument("solve_lp: row length mismatch");
        }
        if (r.rel != '<' && r.rel != '>' && r.rel != '=') {
            throw std::invalid_argument("solve_lp: relation must be <, > or =");
        }
    }

    // column layout: structural | slack/surplus (one per inequality) | artificial
    int n_slack = 0;
    for (const auto& r : lp.rows) {
        if (r.rel != '=') ++n_slack;
    }
    int total = n + n_slack + m;  // at most one artificial per row
    Tableau t(m, total);

    int slack_at = n;
    int art_at = n + n_slack;
    std::vector<int> art_col(m, -1);
    for (int i = 0; i < m; ++i) {
        const auto& r = lp.rows[i];
        double sgn = (r.b < 0.0) ? -1.0 : 1.0;  // normalize rhs nonnegative
        for (int j = 0; j < n; ++j) t.a_[i][j] = sgn * r.a[j];
        t.a_[i][total] = sgn * r.b;
        char rel = r.rel;
        if (sgn < 0.0 && rel != '=') rel = (rel == '<') ? '>' : '<';
        if (rel == '<') {
            t.a_[i][slack_at] = 1.0;
            t.basis_[i] = slack_at++;
        } else {
            if (rel == '>') t.a_[i][slack_at++] = -1.0;
            t.a_[i][art_at] = 1.0;
            art_col[i] = art_at;
            t.basis_[i] = art_at++;
        }
    }

    // phase 1: minimize artificial sum
    bool need_phase1 = false;
    std::vector<double> cost1(total, 0.0);
    for (int i = 0; i < m; ++i) {
        if (art_col[i] >= 0) {
            cost1[art_col[i]] = 1.0;
            need_phase1 = true;
        }
    }
    std::vector<bool> allow_all(total, true);
    LpResult out;
    if (need_phase1) {
        if (!t.optimize(cost1, allow_all)) {
            throw std::runtime_error("solve_lp: phase 1 unbounded (internal error)");
        }
        double art_val = 0.0;
        for (int i = 0; i < m; ++i) {
            if (t.basis_[i] >= n + n_slack) art_val += t.a_[i][total];
        }
        if (art_val > 1e-7) {
            out.status = LpResult::Status::Infeasible;
            return out;
        }
        // drive lingering artificials out of the basis where possible
        for (int i = 0; i < m; ++i) {
            if (t.basis_[i] >= n + n_slack) {
                for (int j = 0; j < n + n_slack; ++j) {
                    if (std::fabs(t.a_[i][j]) > kEps) {
                        t.pivot(i, j);
                        break;
                    }
                }
            }
        }
    }

    // phase 2: artificials barred from re-entering
    std::vector<double> cost2(total, 0.0);
    for (int j = 0; j < n; ++j) cost2[j] = lp.c[j];
    std::vector<bool> allowed(total, true);
    for (int j = n + n_slack; j < total; ++j) allowed[j] = false;
    if (!t.optimize(cost2, allowed)) {
        out.status = LpResult::Status::Unbounded;
        return out;
    }

    out.status = LpResult::Status::Optimal;
    out.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i) {
        if (t.basis_[i] < n) out.x[t.basis_[i]] = t.a_[i][total];
    }
    out.objective = 0.0;
    for (int j = 0; j < n; ++j) out.objective += lp.c[j] * out.x[j];
    return out;
}

}  // namespace interpkit
