#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace interpkit {

// Thrown by sparse_tau when the parameter function (or its conjugate) is
// bounded, so the inductive doubling step cannot be solved.
class RangeAssumptionViolated : public std::runtime_error {
public:
    explicit RangeAssumptionViolated(const std::string& what) : std::runtime_error(what) {}
};

// Quasi-concave parameter function rho: positive, nondecreasing, rho(t)/t
// nonincreasing on (0,inf). Closed catalog of shapes; values are exact for
// power laws and piecewise-linear kinds.
class QcFunction {
public:
    enum class Kind { PowerLaw, PowerLog, MinAffine, ConcaveMajorant };

    // rho(t) = t^theta, theta in [0,1]
    static QcFunction power_law(double theta);
    // rho(t) = t^theta * (1 + |log t|)^beta, theta in (0,1)
    static QcFunction power_log(double theta, double beta);
    // rho(t) = max_i min(c_i, t * d_i), c_i, d_i > 0
    static QcFunction min_affine(std::vector<std::pair<double, double>> pairs);
    // least quasi-concave majorant of a finite sample set (t_i, y_i), t_i, y_i > 0
    static QcFunction concave_majorant(std::vector<std::pair<double, double>> samples);

    double operator()(double t) const;
    // conjugate rho'(t) = t / rho(t), again quasi-concave
    double conjugate(double t) const;

    Kind kind() const { return kind_; }
    double theta() const { return theta_; }
    double beta() const { return beta_; }
    const std::vector<std::pair<double, double>>& pairs() const { return pairs_; }

    std::string describe() const;

    // default-constructed instances are the constant function 1
    QcFunction() = default;

private:
    Kind kind_ = Kind::PowerLaw;
    double theta_ = 0.0;
    double beta_ = 0.0;
    std::vector<std::pair<double, double>> pairs_;  // MinAffine (c_i, d_i)
    std::vector<std::pair<double, double>> hull_;   // ConcaveMajorant hull, starts at (0,0)
    double hull_peak_t_ = 0.0;                      // clamp point: rho constant beyond it
};

// n log-spaced points covering [lo, hi]
std::vector<double> log_grid(double lo, double hi, int n);

// dilation function s_rho(t) = sup_u rho(t*u)/rho(u), sup over the grid.
// Exact t^theta for power laws regardless of the grid.
double dilation(const QcFunction& rho, double t, const std::vector<double>& grid);

// Fitted growth exponents (alpha0 at 0, alpha1 at infinity) of s_rho;
// membership in the two-sided power class requires both inside (0,1).
std::pair<double, double> dilation_exponents(const QcFunction& rho);
bool is_power_class_two_sided(const QcFunction& rho);

// weight n -> w0_n / rho(w0_n / w1_n)
std::vector<double> derived_weight(const QcFunction& rho,
                                   const std::vector<double>& w0,
                                   const std::vector<double>& w1);

// Sparse grid tau_k, k in [k_min, k_max], tau_0 = 1, consecutive terms solve
// min(rho(tau_{k+1})/rho(tau_k), rho'(tau_{k+1})/rho'(tau_k)) = 2.
struct SparseSequence {
    int k_min = 0;
    int k_max = 0;
    std::vector<double> tau;  // tau[i] corresponds to k = k_min + i
    QcFunction source;
    double ratio_constant = 2.0;
    bool truncated_low = false;
    bool truncated_high = false;

    double at(int k) const;
    int size() const { return static_cast<int>(tau.size()); }
};

SparseSequence sparse_tau(const QcFunction& rho, int k_min, int k_max,
                          bool truncate = false);

// Checks the catalog invariants (positive, nondecreasing, rho(t)/t
// nonincreasing) on the given grid; returns the first offending t or 0.
double quasi_concavity_violation(const QcFunction& rho, const std::vector<double>& grid,
                                 double tol = 1e-9);

}  // namespace interpkit
