#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "interpkit/qcfun.hpp"

namespace interpkit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using Vec = std::vector<double>;

// Compensated (Neumaier) summation; all norms in the toolkit accumulate
// through this so 1e-12 level invariants stay meaningful.
class KahanSum {
public:
    void add(double v) {
        double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// 0/0 -> 0 ratio convention used throughout
inline double safe_ratio(double num, double den) {
    if (num == 0.0) return 0.0;
    return num / den;
}

// A pair of weighted lp norms over one finite index set: (lp(w0), lp(w1)).
// Labels are integers (possibly negative) so lambda-adic couples carry k
// directly as the label.
struct WeightedCouple {
    std::vector<long long> labels;
    Vec w0;
    Vec w1;
    double p = kInf;

    size_t size() const { return labels.size(); }
    double tau(size_t n) const { return w0[n] / w1[n]; }

    void validate() const;

    // (lp({1}), lp({lambda^-k})) over k in [k_min, k_max]
    static WeightedCouple lambda_adic(double lambda, int k_min, int k_max, double p);
};

// plain dense row-major matrix
struct Matrix {
    size_t rows = 0, cols = 0;
    Vec a;

    Matrix() = default;
    Matrix(size_t r, size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double& at(size_t i, size_t j) { return a[i * cols + j]; }
    double at(size_t i, size_t j) const { return a[i * cols + j]; }
};

struct CoupleOperator {
    Matrix m;  // rows over target index set, cols over source index set
    WeightedCouple source;
    WeightedCouple target;

    void validate() const;
};

double norm_side(const WeightedCouple& c, int side, const Vec& x);

// Exact K-functional; p = 1 (coordinatewise additive splitting) or p = inf
// (piecewise-linear convex clip objective minimized over its breakpoints).
double k_exact(const WeightedCouple& c, double t, const Vec& x);

// sup_n min(w0_n, t*w1_n)|x_n| for p = inf; coincides with k_exact for p = 1.
double k_surrogate(const WeightedCouple& c, double t, const Vec& x);

// J(t,x) = max(||x||_0, t*||x||_1)
double j_functional(const WeightedCouple& c, double t, const Vec& x);

// lp norm of x against derived_weight(rho, w0, w1)
double rho_norm(const WeightedCouple& c, const QcFunction& rho, const Vec& x);

struct OpNorm {
    double value = 0.0;
    bool exact = true;
};

// Number of columns up to which the linf->l1 norm is computed by exact sign
// enumeration; overridable via set_exact_norm_cap / INTERPKIT_CAP.
int exact_norm_cap();
void set_exact_norm_cap(int cap);

// Exact operator norm of A from linf(u) to l1(v): after the diagonal scaling
// a~_jk = v_j a_jk / u_k, max over sign vectors of sum_j |sum_k a~ zeta_k|.
// Falls back to the absolute entry sum (an upper bound) past the cap.
OpNorm opnorm_inf_to_1(const Matrix& A, const Vec& u, const Vec& v);

// max over sides i of the (i,i)-weighted operator norm; exact for source
// p = inf, target p = 1, otherwise an upper bound with exact = false.
OpNorm couple_opnorm(const CoupleOperator& T);

// Exact weighted operator norm lp(u) -> lp(v) for p in {1, inf}; random
// probing lower bound otherwise (exact = false).
OpNorm opnorm_same_p(const Matrix& A, const Vec& u, const Vec& v, double p);

Vec apply(const Matrix& A, const Vec& x);

}  // namespace interpkit
