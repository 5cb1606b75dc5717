#pragma once

#include <string>
#include <vector>

#include "interpkit/qcfun.hpp"

namespace interpkit {

// Nonnegative piecewise-constant function on (0, infinity): value v_i on
// (t_{i-1}, t_i] with t_0 = 0 implicit, zero beyond the last breakpoint.
struct StepFunction {
    std::vector<double> t;  // strictly increasing right endpoints
    std::vector<double> v;  // values, one per piece

    void validate() const;
    size_t pieces() const { return v.size(); }
    double value_at(double s) const;      // 0 beyond the support
    double sup_end() const { return t.empty() ? 0.0 : t.back(); }
    // Lebesgue measure of {s : f(s) > level}
    double measure_above(double level) const;

    static StepFunction indicator(double t_right, double height = 1.0);
};

// equimeasurable nonincreasing rearrangement (exact sort-and-lay-out)
StepFunction rearrange(const StepFunction& f);

struct AdmissibilityResult {
    bool ok = false;
    double constant = 0.0;
    std::string diagnostic;
};

// integral_0^t du/psi(u) <= C1 t/psi(t): measured max ratio over the grid
AdmissibilityResult check_psi(const QcFunction& psi, const std::vector<double>& grid);
// integral_0^t phi(u) du/u <= C2 phi(t)
AdmissibilityResult check_phi(const QcFunction& phi, const std::vector<double>& grid);

// primary single-factor norms, exact on step functions
double m_norm(const QcFunction& psi, const StepFunction& f);
double lambda_norm(const QcFunction& phi, const StepFunction& f);

// audit quantities: the integral-average forms of the two norms
double m_norm_averaged(const QcFunction& psi, const StepFunction& f);
double lambda_norm_averaged(const QcFunction& phi, const StepFunction& f);

// couple K-functionals through the min-weight sum formulas
double k_marcinkiewicz(const QcFunction& psi0, const QcFunction& psi1, double t,
                       const StepFunction& f);
double k_lorentz(const QcFunction& phi0, const QcFunction& phi1, double t,
                 const StepFunction& f);

// helpers with closed forms for power laws, adaptive quadrature otherwise
double integral_inv_psi(const QcFunction& psi, double a, double b);
double integral_phi_over_t(const QcFunction& phi, double a, double b);

struct EmbeddingReport {
    double m_norm_value = 0.0;
    double sup_psi_g = 0.0;
    bool linf_embeds = false;  // m_norm(g) <= sup psi|g|
    double hl_lhs = 0.0;       // integral |g| h
    double hl_rhs = 0.0;       // integral g* h*  (h = phi/t, already nonincreasing)
    bool hardy_littlewood = false;
};

EmbeddingReport embedding_checks(const QcFunction& psi, const QcFunction& phi,
                                 const StepFunction& g);

}  // namespace interpkit
