#include "interpkit/couples.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace interpkit {

void WeightedCouple::validate() const {
    if (w0.size() != labels.size() || w1.size() != labels.size()) {
        throw std::invalid_argument("WeightedCouple: weight/label length mismatch");
    }
    if (!(p >= 1.0)) {
        throw std::invalid_argument("WeightedCouple: exponent must satisfy p >= 1");
    }
    for (size_t n = 0; n < size(); ++n) {
        if (!(w0[n] > 0.0) || !(w1[n] > 0.0) || !std::isfinite(w0[n]) || !std::isfinite(w1[n])) {
            throw std::invalid_argument("WeightedCouple: weights must be positive and finite");
        }
        if (!std::isfinite(tau(n))) {
            throw std::invalid_argument("WeightedCouple: weight ratio overflows");
        }
    }
}

WeightedCouple WeightedCouple::lambda_adic(double lambda, int k_min, int k_max, double p) {
    if (!(lambda > 1.0) || k_min > k_max) {
        throw std::invalid_argument("lambda_adic: need lambda > 1 and k_min <= k_max");
    }
    WeightedCouple c;
    c.p = p;
    for (int k = k_min; k <= k_max; ++k) {
        c.labels.push_back(k);
        c.w0.push_back(1.0);
        c.w1.push_back(std::pow(lambda, -k));
    }
    c.validate();
    return c;
}

void CoupleOperator::validate() const {
    source.validate();
    target.validate();
    if (m.rows != target.size() || m.cols != source.size()) {
        throw std::invalid_argument("CoupleOperator: matrix dimensions do not match couples");
    }
}

namespace {

void check_shape(const WeightedCouple& c, const Vec& x) {
    if (x.size() != c.size()) {
        throw std::invalid_argument("vector length does not match couple index set");
    }
}

const Vec& side_weights(const WeightedCouple& c, int side) {
    if (side == 0) return c.w0;
    if (side == 1) return c.w1;
    throw std::invalid_argument("side must be 0 or 1");
}

double weighted_lp_norm(const Vec& w, const Vec& x, double p) {
    if (p == kInf) {
        double m = 0.0;
        for (size_t n = 0; n < x.size(); ++n) m = std::max(m, w[n] * std::fabs(x[n]));
        return m;
    }
    if (p == 1.0) {
        KahanSum s;
        for (size_t n = 0; n < x.size(); ++n) s.add(w[n] * std::fabs(x[n]));
        return s.value();
    }
    KahanSum s;
    for (size_t n = 0; n < x.size(); ++n) s.add(std::pow(w[n] * std::fabs(x[n]), p));
    return std::pow(s.value(), 1.0 / p);
}

void require_positive_t(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw std::domain_error("parameter t must be positive and finite");
    }
}

}  // namespace

double norm_side(const WeightedCouple& c, int side, const Vec& x) {
    check_shape(c, x);
    return weighted_lp_norm(side_weights(c, side), x, c.p);
}

double k_exact(const WeightedCouple& c, double t, const Vec& x) {
    check_shape(c, x);
    require_positive_t(t);
    const size_t N = c.size();
    if (c.p == 1.0) {
        KahanSum s;
        for (size_t n = 0; n < N; ++n) {
            s.add(std::min(c.w0[n], t * c.w1[n]) * std::fabs(x[n]));
        }
        return s.value();
    }
    if (c.p != kInf) {
        throw std::invalid_argument("k_exact: exact K only for p in {1, inf}");
    }
    // Clip splitting: with side-0 budget b the optimal residual on side 1 is
    // g_n(b) = w1_n * max(0, |x_n| - b/w0_n); minimize f(b) = b + t*max_n g_n(b),
    // a piecewise-linear convex function. Candidate minimizers: b = 0, the
    // zeros b = w0_n|x_n| of each g_n, and the pairwise envelope crossings.
    auto objective = [&](double b) {
        double g = 0.0;
        for (size_t n = 0; n < N; ++n) {
            double r = std::fabs(x[n]) - b / c.w0[n];
            if (r > 0.0) g = std::max(g, c.w1[n] * r);
        }
        return b + t * g;
    };
    std::vector<double> cand;
    cand.push_back(0.0);
    for (size_t n = 0; n < N; ++n) {
        cand.push_back(c.w0[n] * std::fabs(x[n]));
    }
    for (size_t n = 0; n < N; ++n) {
        for (size_t m = n + 1; m < N; ++m) {
            // crossing of the lines w1_n(|x_n| - b/w0_n) and w1_m(|x_m| - b/w0_m)
            double sn = c.w1[n] / c.w0[n], sm = c.w1[m] / c.w0[m];
            if (sn == sm) continue;
            double b = (c.w1[n] * std::fabs(x[n]) - c.w1[m] * std::fabs(x[m])) / (sn - sm);
            if (b > 0.0 && std::isfinite(b)) cand.push_back(b);
        }
    }
    double best = kInf;
    for (double b : cand) best = std::min(best, objective(b));
    return best;
}

double k_surrogate(const WeightedCouple& c, double t, const Vec& x) {
    check_shape(c, x);
    require_positive_t(t);
    if (c.p == 1.0) return k_exact(c, t, x);
    if (c.p != kInf) {
        throw std::invalid_argument("k_surrogate: only p in {1, inf}");
    }
    double m = 0.0;
    for (size_t n = 0; n < c.size(); ++n) {
        m = std::max(m, std::min(c.w0[n], t * c.w1[n]) * std::fabs(x[n]));
    }
    return m;
}

double j_functional(const WeightedCouple& c, double t, const Vec& x) {
    require_positive_t(t);
    return std::max(norm_side(c, 0, x), t * norm_side(c, 1, x));
}

double rho_norm(const WeightedCouple& c, const QcFunction& rho, const Vec& x) {
    check_shape(c, x);
    return weighted_lp_norm(derived_weight(rho, c.w0, c.w1), x, c.p);
}

namespace {

int g_exact_cap = -1;  // lazily initialized from INTERPKIT_CAP

}  // namespace

int exact_norm_cap() {
    if (g_exact_cap < 0) {
        g_exact_cap = 20;
        if (const char* env = std::getenv("INTERPKIT_CAP")) {
            int v = std::atoi(env);
            if (v >= 1) g_exact_cap = v;
        }
    }
    return g_exact_cap;
}

void set_exact_norm_cap(int cap) {
    if (cap < 1) throw std::invalid_argument("exact norm cap must be >= 1");
    g_exact_cap = cap;
}

OpNorm opnorm_inf_to_1(const Matrix& A, const Vec& u, const Vec& v) {
    if (u.size() != A.cols || v.size() != A.rows) {
        throw std::invalid_argument("opnorm_inf_to_1: weight dimensions do not match matrix");
    }
    Matrix S(A.rows, A.cols);
    for (size_t j = 0; j < A.rows; ++j) {
        for (size_t k = 0; k < A.cols; ++k) {
            S.at(j, k) = v[j] * A.at(j, k) / u[k];
        }
    }
    if (static_cast<int>(A.cols) > exact_norm_cap()) {
        KahanSum s;
        for (double e : S.a) s.add(std::fabs(e));
        return {s.value(), false};
    }
    if (A.cols == 0 || A.rows == 0) return {0.0, true};
    // Gray-code walk over sign vectors with the last sign pinned to +1
    // (global flip symmetry); row sums updated incrementally.
    Vec row(A.rows, 0.0);
    for (size_t j = 0; j < A.rows; ++j) {
        double s = 0.0;
        for (size_t k = 0; k < A.cols; ++k) s += S.at(j, k);
        row[j] = s;
    }
    auto l1 = [&]() {
        KahanSum s;
        for (double r : row) s.add(std::fabs(r));
        return s.value();
    };
    double best = l1();
    const size_t free_cols = A.cols - 1;
    std::vector<int> sign(A.cols, 1);
    const uint64_t steps = (free_cols == 0) ? 0 : (uint64_t(1) << free_cols) - 1;
    for (uint64_t i = 1; i <= steps; ++i) {
        // Gray code: flip the bit at the lowest set position of i
        unsigned long long bit = i & (~i + 1);
        size_t k = 0;
        while ((bit >> k) != 1ULL) ++k;
        sign[k] = -sign[k];
        double delta = 2.0 * sign[k];
        for (size_t j = 0; j < A.rows; ++j) {
            row[j] += delta * S.at(j, k);
        }
        best = std::max(best, l1());
    }
    return {best, true};
}

OpNorm couple_opnorm(const CoupleOperator& T) {
    T.validate();
    if (T.source.p == kInf && T.target.p == 1.0) {
        OpNorm n0 = opnorm_inf_to_1(T.m, T.source.w0, T.target.w0);
        OpNorm n1 = opnorm_inf_to_1(T.m, T.source.w1, T.target.w1);
        return {std::max(n0.value, n1.value), n0.exact && n1.exact};
    }
    // other (p,q): absolute-sum upper bound after per-side scaling
    double bound = 0.0;
    for (int side = 0; side < 2; ++side) {
        const Vec& u = side == 0 ? T.source.w0 : T.source.w1;
        const Vec& v = side == 0 ? T.target.w0 : T.target.w1;
        KahanSum s;
        for (size_t j = 0; j < T.m.rows; ++j) {
            for (size_t k = 0; k < T.m.cols; ++k) {
                s.add(std::fabs(v[j] * T.m.at(j, k) / u[k]));
            }
        }
        bound = std::max(bound, s.value());
    }
    return {bound, false};
}

OpNorm opnorm_same_p(const Matrix& A, const Vec& u, const Vec& v, double p) {
    if (u.size() != A.cols || v.size() != A.rows) {
        throw std::invalid_argument("opnorm_same_p: weight dimensions do not match matrix");
    }
    if (p == kInf) {
        // linf(u) -> linf(v): max_j v_j * sum_k |a_jk| / u_k
        double best = 0.0;
        for (size_t j = 0; j < A.rows; ++j) {
            KahanSum s;
            for (size_t k = 0; k < A.cols; ++k) s.add(std::fabs(A.at(j, k)) / u[k]);
            best = std::max(best, v[j] * s.value());
        }
        return {best, true};
    }
    if (p == 1.0) {
        // l1(u) -> l1(v): max_k (sum_j v_j |a_jk|) / u_k
        double best = 0.0;
        for (size_t k = 0; k < A.cols; ++k) {
            KahanSum s;
            for (size_t j = 0; j < A.rows; ++j) s.add(v[j] * std::fabs(A.at(j, k)));
            best = std::max(best, s.value() / u[k]);
        }
        return {best, true};
    }
    // random probing lower bound; deterministic splitmix stream
    uint64_t state = 0x9e3779b97f4a7c15ULL;
    auto next_unit = [&]() {
        state += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return 2.0 * (double(z) / double(~uint64_t(0))) - 1.0;
    };
    double best = 0.0;
    for (int trial = 0; trial < 256; ++trial) {
        Vec x(A.cols);
        for (auto& e : x) e = next_unit();
        double xn = weighted_lp_norm(u, x, p);
        if (xn == 0.0) continue;
        Vec y = interpkit::apply(A, x);
        best = std::max(best, weighted_lp_norm(v, y, p) / xn);
    }
    return {best, false};
}

Vec apply(const Matrix& A, const Vec& x) {
    if (x.size() != A.cols) {
        throw std::invalid_argument("apply: vector length does not match matrix");
    }
    Vec y(A.rows, 0.0);
    for (size_t j = 0; j < A.rows; ++j) {
        KahanSum s;
        for (size_t k = 0; k < A.cols; ++k) s.add(A.at(j, k) * x[k]);
        y[j] = s.value();
    }
    return y;
}

}  // namespace interpkit
