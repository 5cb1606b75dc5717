#include "interpkit/qcfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace interpkit {

namespace {

void require_positive(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw std::domain_error("QcFunction: argument must be a positive finite real");
    }
}

// cross product sign for upper-hull construction
double cross(const std::pair<double, double>& o, const std::pair<double, double>& a,
             const std::pair<double, double>& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
}

}  // namespace

QcFunction QcFunction::power_law(double theta) {
    if (theta < 0.0 || theta > 1.0) {
        throw std::invalid_argument("power_law: theta must lie in [0,1]");
    }
    QcFunction f;
    f.kind_ = Kind::PowerLaw;
    f.theta_ = theta;
    return f;
}

QcFunction QcFunction::power_log(double theta, double beta) {
    if (!(theta > 0.0) || !(theta < 1.0)) {
        throw std::invalid_argument("power_log: theta must lie in (0,1)");
    }
    QcFunction f;
    f.kind_ = Kind::PowerLog;
    f.theta_ = theta;
    f.beta_ = beta;
    return f;
}

QcFunction QcFunction::min_affine(std::vector<std::pair<double, double>> pairs) {
    if (pairs.empty()) {
        throw std::invalid_argument("min_affine: need at least one (c,d) pair");
    }
    for (auto& [c, d] : pairs) {
        if (!(c > 0.0) || !(d > 0.0)) {
            throw std::invalid_argument("min_affine: all c_i, d_i must be positive");
        }
    }
    QcFunction f;
    f.kind_ = Kind::MinAffine;
    f.pairs_ = std::move(pairs);
    return f;
}

QcFunction QcFunction::concave_majorant(std::vector<std::pair<double, double>> samples) {
    if (samples.empty()) {
        throw std::invalid_argument("concave_majorant: need at least one sample");
    }
    for (auto& [t, y] : samples) {
        if (!(t > 0.0) || !(y > 0.0)) {
            throw std::invalid_argument("concave_majorant: samples must be positive");
        }
    }
    std::sort(samples.begin(), samples.end());
    // keep only the highest sample at duplicated abscissae
    std::vector<std::pair<double, double>> dedup;
    for (const auto& p : samples) {
        if (!dedup.empty() && dedup.back().first == p.first) {
            dedup.back().second = std::max(dedup.back().second, p.second);
        } else {
            dedup.push_back(p);
        }
    }
    samples = std::move(dedup);
    // Upper concave hull anchored at the origin; rho(t)/t nonincreasing follows
    // from concavity through (0,0), monotonicity from clamping past the peak.
    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(0.0, 0.0);
    for (const auto& p : samples) pts.push_back(p);
    std::vector<std::pair<double, double>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0.0) {
            hull.pop_back();
        }
        hull.push_back(p);
    }
    QcFunction f;
    f.kind_ = Kind::ConcaveMajorant;
    f.hull_ = std::move(hull);
    double peak_y = -1.0;
    for (const auto& [t, y] : f.hull_) {
        if (y > peak_y) {
            peak_y = y;
            f.hull_peak_t_ = t;
        }
    }
    return f;
}

double QcFunction::operator()(double t) const {
    require_positive(t);
    switch (kind_) {
        case Kind::PowerLaw:
            if (theta_ == 0.0) return 1.0;
            if (theta_ == 1.0) return t;
            return std::pow(t, theta_);
        case Kind::PowerLog:
            return std::pow(t, theta_) * std::pow(1.0 + std::fabs(std::log(t)), beta_);
        case Kind::MinAffine: {
            double best = 0.0;
            for (const auto& [c, d] : pairs_) {
                best = std::max(best, std::min(c, t * d));
            }
            return best;
        }
        case Kind::ConcaveMajorant: {
            double s = std::min(t, hull_peak_t_);
            // hull_ has at least (0,0) and one positive sample
            if (s >= hull_.back().first) return hull_.back().second;
            auto it = std::upper_bound(hull_.begin(), hull_.end(), std::make_pair(s, 0.0),
                                       [](const auto& a, const auto& b) { return a.first < b.first; });
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            double w = (s - lo.first) / (hi.first - lo.first);
            return lo.second + w * (hi.second - lo.second);
        }
    }
    return 0.0;  // unreachable
}

double QcFunction::conjugate(double t) const {
    require_positive(t);
    return t / (*this)(t);
}

std::string QcFunction::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::PowerLaw: os << "power(theta=" << theta_ << ")"; break;
        case Kind::PowerLog: os << "powerlog(theta=" << theta_ << ",beta=" << beta_ << ")"; break;
        case Kind::MinAffine: os << "min_affine[" << pairs_.size() << "]"; break;
        case Kind::ConcaveMajorant: os << "concave_majorant[" << hull_.size() - 1 << "]"; break;
    }
    return os.str();
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi >= lo) || n < 1) {
        throw std::invalid_argument("log_grid: need 0 < lo <= hi and n >= 1");
    }
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) {
        g[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
    }
    return g;
}

double dilation(const QcFunction& rho, double t, const std::vector<double>& grid) {
    require_positive(t);
    if (rho.kind() == QcFunction::Kind::PowerLaw) {
        return std::pow(t, rho.theta());
    }
    if (grid.empty()) {
        throw std::invalid_argument("dilation: grid must be non-empty");
    }
    double best = 0.0;
    for (double u : grid) {
        best = std::max(best, rho(t * u) / rho(u));
    }
    return best;
}

std::pair<double, double> dilation_exponents(const QcFunction& rho) {
    // Fit s_rho(t) ~ t^alpha at both ends of a wide log grid.
    auto grid = log_grid(1e-8, 1e8, 129);
    double t_small = 1.0 / 4096.0, t_big = 4096.0;
    double s_small = dilation(rho, t_small, grid);
    double s_big = dilation(rho, t_big, grid);
    double alpha0 = std::log(s_small) / std::log(t_small);
    double alpha1 = std::log(s_big) / std::log(t_big);
    return {alpha0, alpha1};
}

bool is_power_class_two_sided(const QcFunction& rho) {
    auto [a0, a1] = dilation_exponents(rho);
    const double eps = 1e-3;
    return a0 > eps && a0 < 1.0 - eps && a1 > eps && a1 < 1.0 - eps;
}

std::vector<double> derived_weight(const QcFunction& rho, const std::vector<double>& w0,
                                   const std::vector<double>& w1) {
    if (w0.size() != w1.size()) {
        throw std::invalid_argument("derived_weight: w0 and w1 must have equal length");
    }
    std::vector<double> out(w0.size());
    for (size_t n = 0; n < w0.size(); ++n) {
        if (!(w0[n] > 0.0) || !(w1[n] > 0.0)) {
            throw std::domain_error("derived_weight: weights must be positive");
        }
        out[n] = w0[n] / rho(w0[n] / w1[n]);
    }
    return out;
}

double SparseSequence::at(int k) const {
    if (k < k_min || k > k_max) {
        throw std::out_of_range("SparseSequence::at: k outside stored range");
    }
    return tau[static_cast<size_t>(k - k_min)];
}

namespace {

// log-domain limits keeping rho evaluations finite
constexpr double kLogMin = -690.0;
constexpr double kLogMax = 690.0;

// Solve for u > t_prev: min(rho(u)/rho(t_prev), rho'(u)/rho'(t_prev)) = 2.
// Both ratios are nondecreasing in u, so bisection on log u applies.
// Returns NaN when the target value is unreachable within the working range.
double solve_forward(const QcFunction& rho, double t_prev) {
    double r0 = rho(t_prev);
    double c0 = rho.conjugate(t_prev);
    auto g = [&](double logu) {
        double u = std::exp(logu);
        return std::min(rho(u) / r0, rho.conjugate(u) / c0);
    };
    double lo = std::log(t_prev), hi = kLogMax;
    if (g(hi) < 2.0) return std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) < 2.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-14 * std::max(1.0, std::fabs(hi))) break;
    }
    return std::exp(0.5 * (lo + hi));
}

// Symmetric division step: for known t_next find u < t_next with
// min(rho(t_next)/rho(u), rho'(t_next)/rho'(u)) = 2 (nonincreasing in u).
double solve_backward(const QcFunction& rho, double t_next) {
    double r1 = rho(t_next);
    double c1 = rho.conjugate(t_next);
    auto g = [&](double logu) {
        double u = std::exp(logu);
        return std::min(r1 / rho(u), c1 / rho.conjugate(u));
    };
    double lo = kLogMin, hi = std::log(t_next);
    if (g(lo) < 2.0) return std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) < 2.0) {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo < 1e-14 * std::max(1.0, std::fabs(lo))) break;
    }
    return std::exp(0.5 * (lo + hi));
}

}  // namespace

SparseSequence sparse_tau(const QcFunction& rho, int k_min, int k_max, bool truncate) {
    if (k_min > 0 || k_max < 0 || k_min > k_max) {
        throw std::invalid_argument("sparse_tau: range must contain k = 0");
    }
    std::vector<double> fwd;  // tau_1 .. tau_k_max
    fwd.reserve(static_cast<size_t>(k_max));
    bool trunc_high = false;
    double cur = 1.0;
    for (int k = 1; k <= k_max; ++k) {
        double nxt = solve_forward(rho, cur);
        if (!std::isfinite(nxt)) {
            if (truncate) {
                trunc_high = true;
                break;
            }
            throw RangeAssumptionViolated(
                "sparse_tau: " + rho.describe() +
                " cannot double past tau = " + std::to_string(cur));
        }
        fwd.push_back(nxt);
        cur = nxt;
    }
    std::vector<double> bwd;  // tau_{-1} .. tau_{k_min}
    bwd.reserve(static_cast<size_t>(-k_min));
    bool trunc_low = false;
    cur = 1.0;
    for (int k = -1; k >= k_min; --k) {
        double prv = solve_backward(rho, cur);
        if (!std::isfinite(prv)) {
            if (truncate) {
                trunc_low = true;
                break;
            }
            throw RangeAssumptionViolated(
                "sparse_tau: " + rho.describe() +
                " cannot halve below tau = " + std::to_string(cur));
        }
        bwd.push_back(prv);
        cur = prv;
    }

    SparseSequence s;
    s.source = rho;
    s.truncated_low = trunc_low;
    s.truncated_high = trunc_high;
    s.k_min = -static_cast<int>(bwd.size());
    s.k_max = static_cast<int>(fwd.size());
    s.tau.resize(bwd.size() + 1 + fwd.size());
    for (size_t i = 0; i < bwd.size(); ++i) {
        s.tau[bwd.size() - 1 - i] = bwd[i];
    }
    s.tau[bwd.size()] = 1.0;
    for (size_t i = 0; i < fwd.size(); ++i) {
        s.tau[bwd.size() + 1 + i] = fwd[i];
    }
    return s;
}

double quasi_concavity_violation(const QcFunction& rho, const std::vector<double>& grid,
                                 double tol) {
    std::vector<double> g = grid;
    std::sort(g.begin(), g.end());
    for (size_t i = 0; i < g.size(); ++i) {
        double v = rho(g[i]);
        if (!(v > 0.0)) return g[i];
        if (i > 0) {
            double prev = rho(g[i - 1]);
            if (v < prev * (1.0 - tol)) return g[i];
            if (v / g[i] > (prev / g[i - 1]) * (1.0 + tol)) return g[i];
        }
    }
    return 0.0;
}

}  // namespace interpkit
