#include "interpkit/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "interpkit/couples.hpp"

namespace interpkit {

void StepFunction::validate() const {
    if (t.size() != v.size()) {
        throw std::invalid_argument("StepFunction: breakpoint/value count mismatch");
    }
    double prev = 0.0;
    for (double ti : t) {
        if (!(ti > prev) || !std::isfinite(ti)) {
            throw std::invalid_argument("StepFunction: breakpoints must increase from 0");
        }
        prev = ti;
    }
    for (double vi : v) {
        if (!(vi >= 0.0) || !std::isfinite(vi)) {
            throw std::invalid_argument("StepFunction: values must be finite and nonnegative");
        }
    }
}

double StepFunction::value_at(double s) const {
    if (s <= 0.0) return 0.0;
    auto it = std::lower_bound(t.begin(), t.end(), s);
    if (it == t.end()) return 0.0;
    return v[static_cast<size_t>(it - t.begin())];
}

double StepFunction::measure_above(double level) const {
    KahanSum m;
    double left = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        if (v[i] > level) m.add(t[i] - left);
        left = t[i];
    }
    return m.value();
}

StepFunction StepFunction::indicator(double t_right, double height) {
    StepFunction f;
    f.t = {t_right};
    f.v = {height};
    f.validate();
    return f;
}

StepFunction rearrange(const StepFunction& f) {
    f.validate();
    std::vector<std::pair<double, double>> pieces;  // (value, width)
    double left = 0.0;
    for (size_t i = 0; i < f.v.size(); ++i) {
        pieces.emplace_back(f.v[i], f.t[i] - left);
        left = f.t[i];
    }
    std::stable_sort(pieces.begin(), pieces.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    StepFunction out;
    double cum = 0.0;
    for (const auto& [val, width] : pieces) {
        cum += width;
        out.t.push_back(cum);
        out.v.push_back(val);
    }
    return out;
}

namespace {

// Simpson's rule with recursive refinement; integrand assumed smooth on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double lhs = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double rhs = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double split = lhs + rhs;
    if (depth <= 0 || std::fabs(split - whole) <= 15.0 * tol) {
        return split + (split - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, lhs, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, rhs, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Integral of f over (0, b] by dyadic chunks from b downward. Divergence at 0
// shows up as chunk sums that stop decaying; the geometric tail of a decaying
// chunk sequence is extrapolated.
double integrate_from_zero(const std::function<double(double)>& f, double b, double tol) {
    KahanSum total;
    double hi = b;
    double prev_chunk = -1.0;
    for (int j = 0; j < 600; ++j) {
        double lo = 0.5 * hi;
        double chunk = integrate(f, lo, hi, tol * 0.01);
        total.add(chunk);
        if (chunk <= tol * std::max(1.0, total.value()) * 1e-4) return total.value();
        if (prev_chunk > 0.0 && j >= 60) {
            double r = chunk / prev_chunk;
            if (r >= 1.0 - 1e-7) return kInf;
            if (r < 0.999) {
                total.add(chunk * r / (1.0 - r));
                return total.value();
            }
        }
        prev_chunk = chunk;
        hi = lo;
    }
    return total.value();
}

// limit of the catalog function at 0+ (positive only for constants)
double limit_at_zero(const QcFunction& phi) {
    if (phi.kind() == QcFunction::Kind::PowerLaw && phi.theta() == 0.0) return 1.0;
    return 0.0;
}

}  // namespace

double integral_inv_psi(const QcFunction& psi, double a, double b) {
    if (!(b > a) || b == a) return 0.0;
    if (psi.kind() == QcFunction::Kind::PowerLaw) {
        double th = psi.theta();
        if (th == 1.0) {
            if (a == 0.0) return kInf;
            return std::log(b / a);
        }
        return (std::pow(b, 1.0 - th) - std::pow(a, 1.0 - th)) / (1.0 - th);
    }
    auto f = [&](double u) { return u > 0.0 ? 1.0 / psi(u) : 0.0; };
    if (a == 0.0) return integrate_from_zero(f, b, 1e-8);
    return integrate(f, a, b, 1e-8);
}

double integral_phi_over_t(const QcFunction& phi, double a, double b) {
    if (!(b > a) || b == a) return 0.0;
    if (phi.kind() == QcFunction::Kind::PowerLaw) {
        double th = phi.theta();
        if (th == 0.0) {
            if (a == 0.0) return kInf;
            return std::log(b / a);
        }
        return (std::pow(b, th) - std::pow(a, th)) / th;
    }
    auto f = [&](double u) { return u > 0.0 ? phi(u) / u : 0.0; };
    if (a == 0.0) return integrate_from_zero(f, b, 1e-8);
    return integrate(f, a, b, 1e-8);
}

AdmissibilityResult check_psi(const QcFunction& psi, const std::vector<double>& grid) {
    AdmissibilityResult res;
    if (grid.empty()) {
        res.diagnostic = "empty grid";
        return res;
    }
    double c = 0.0;
    for (double t : grid) {
        if (!(t > 0.0)) {
            res.diagnostic = "grid points must be positive";
            return res;
        }
        double num = integral_inv_psi(psi, 0.0, t);
        if (!std::isfinite(num)) {
            res.diagnostic = "integral of 1/psi diverges at 0 (t = " + std::to_string(t) + ")";
            return res;
        }
        c = std::max(c, num * psi(t) / t);
    }
    res.ok = true;
    res.constant = c;
    return res;
}

AdmissibilityResult check_phi(const QcFunction& phi, const std::vector<double>& grid) {
    AdmissibilityResult res;
    if (grid.empty()) {
        res.diagnostic = "empty grid";
        return res;
    }
    double c = 0.0;
    for (double t : grid) {
        if (!(t > 0.0)) {
            res.diagnostic = "grid points must be positive";
            return res;
        }
        double num = integral_phi_over_t(phi, 0.0, t);
        if (!std::isfinite(num)) {
            res.diagnostic = "integral of phi/u diverges at 0 (t = " + std::to_string(t) + ")";
            return res;
        }
        c = std::max(c, num / phi(t));
    }
    res.ok = true;
    res.constant = c;
    return res;
}

double m_norm(const QcFunction& psi, const StepFunction& f) {
    StepFunction fs = rearrange(f);
    double m = 0.0;
    // psi nondecreasing and f* constant per piece, so each piece peaks at its
    // right endpoint
    for (size_t i = 0; i < fs.v.size(); ++i) {
        m = std::max(m, psi(fs.t[i]) * fs.v[i]);
    }
    return m;
}

double lambda_norm(const QcFunction& phi, const StepFunction& f) {
    StepFunction fs = rearrange(f);
    KahanSum s;
    double left_val = limit_at_zero(phi);
    for (size_t i = 0; i < fs.v.size(); ++i) {
        double right_val = phi(fs.t[i]);
        s.add(fs.v[i] * (right_val - left_val));
        left_val = right_val;
    }
    return s.value();
}

double m_norm_averaged(const QcFunction& psi, const StepFunction& f) {
    StepFunction fs = rearrange(f);
    double m = 0.0;
    double left = 0.0;
    KahanSum cum;
    const int kSamples = 64;
    for (size_t i = 0; i < fs.v.size(); ++i) {
        for (int s = 1; s <= kSamples; ++s) {
            double t = left + (fs.t[i] - left) * s / kSamples;
            double integral = cum.value() + fs.v[i] * (t - left);
            m = std::max(m, psi(t) / t * integral);
        }
        cum.add(fs.v[i] * (fs.t[i] - left));
        left = fs.t[i];
    }
    // beyond the support the integral is constant and psi(t)/t nonincreasing
    return m;
}

double lambda_norm_averaged(const QcFunction& phi, const StepFunction& f) {
    StepFunction fs = rearrange(f);
    KahanSum s;
    double left = 0.0;
    for (size_t i = 0; i < fs.v.size(); ++i) {
        if (fs.v[i] > 0.0) {
            double piece = integral_phi_over_t(phi, left, fs.t[i]);
            if (!std::isfinite(piece)) return kInf;
            s.add(fs.v[i] * piece);
        }
        left = fs.t[i];
    }
    return s.value();
}

double k_marcinkiewicz(const QcFunction& psi0, const QcFunction& psi1, double t,
                       const StepFunction& f) {
    if (!(t > 0.0)) throw std::invalid_argument("k_marcinkiewicz: t must be positive");
    StepFunction fs = rearrange(f);
    double m = 0.0;
    for (size_t i = 0; i < fs.v.size(); ++i) {
        m = std::max(m, std::min(psi0(fs.t[i]), t * psi1(fs.t[i])) * fs.v[i]);
    }
    return m;
}

double k_lorentz(const QcFunction& phi0, const QcFunction& phi1, double t,
                 const StepFunction& f) {
    if (!(t > 0.0)) throw std::invalid_argument("k_lorentz: t must be positive");
    StepFunction fs = rearrange(f);
    KahanSum s;
    double left_val = std::min(limit_at_zero(phi0), t * limit_at_zero(phi1));
    for (size_t i = 0; i < fs.v.size(); ++i) {
        double right_val = std::min(phi0(fs.t[i]), t * phi1(fs.t[i]));
        s.add(fs.v[i] * (right_val - left_val));
        left_val = right_val;
    }
    return s.value();
}

EmbeddingReport embedding_checks(const QcFunction& psi, const QcFunction& phi,
                                 const StepFunction& g) {
    g.validate();
    EmbeddingReport rep;
    rep.m_norm_value = m_norm(psi, g);
    for (size_t i = 0; i < g.v.size(); ++i) {
        rep.sup_psi_g = std::max(rep.sup_psi_g, psi(g.t[i]) * g.v[i]);
    }
    rep.linf_embeds = rep.m_norm_value <= rep.sup_psi_g * (1.0 + 1e-12);

    // h = phi(t)/t is nonincreasing, so h* = h and the right side pairs the
    // rearrangement with it
    StepFunction gs = rearrange(g);
    auto pair_with_h = [&](const StepFunction& u) {
        KahanSum s;
        double left = 0.0;
        for (size_t i = 0; i < u.v.size(); ++i) {
            if (u.v[i] > 0.0) {
                double piece = integral_phi_over_t(phi, left, u.t[i]);
                if (!std::isfinite(piece)) return kInf;
                s.add(u.v[i] * piece);
            }
            left = u.t[i];
        }
        return s.value();
    };
    rep.hl_lhs = pair_with_h(g);
    rep.hl_rhs = pair_with_h(gs);
    rep.hardy_littlewood =
        rep.hl_lhs <= rep.hl_rhs * (1.0 + 1e-9) + 1e-12 || rep.hl_rhs == kInf;
    return rep;
}

}  // namespace interpkit
