#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "interpkit/couples.hpp"
#include "interpkit/nuclear.hpp"
#include "interpkit/qcfun.hpp"

namespace interpkit {

// Off-diagonal decay profile: eps_m dominates min(w0_k/z0_j, w1_k/z1_j)
// over realized pairs with j - k = m.
struct EpsilonProfile {
    long long m_min = 0, m_max = 0;
    std::vector<double> values;
    double sum = 0.0;
    bool convergent = true;

    double at(long long m) const;
};

// entrywise a_jk = max(z0_j/w0_k, z1_j/w1_k) t_jk
Matrix scaled_matrix(const CoupleOperator& T);

// m -> sum over j - k = m of |a_jk|, labels taken from the couples
std::map<long long, double> diagonal_sums(const Matrix& A,
                                          const std::vector<long long>& row_labels,
                                          const std::vector<long long>& col_labels);

// tight profile over the realized (j,k) pairs of the two couples
EpsilonProfile epsilon_profile(const WeightedCouple& source, const WeightedCouple& target);

// profile of min(1, sigma_j/tau_k) rho(tau_k)/lam(sigma_j) over pairs with
// k - j = m
EpsilonProfile epsilon_profile_rho(const std::vector<double>& tau,
                                   const std::vector<long long>& tau_labels,
                                   const std::vector<double>& sigma,
                                   const std::vector<long long>& sigma_labels,
                                   const QcFunction& rho, const QcFunction& lam);

struct Lemma1Result {
    double bound = 0.0;        // scaled_norm * sum eps_m (or +inf)
    double scaled_norm = 0.0;  // exact linf->l1 norm of the scaled matrix
    bool exact = true;
    NuclearDecomposition decomp;  // point-mass terms certifying nuclearity
};

Lemma1Result lemma1_bound(const CoupleOperator& T, const EpsilonProfile& profile);

// Piecewise-linear prolongation from sequences on the tau grid to functions
// on a refinement grid of (0, infinity); both side norms are at most 1.
struct Lemma2Iota {
    std::vector<double> tau;       // increasing grid nodes
    std::vector<double> refine;    // evaluation grid covering [tau_front, tau_back]
    Vec a;                         // samples {x(tau_k)}

    // PL interpolation of b between the tau nodes, clamped at the ends
    Vec apply(const Vec& b) const;
    // discretized (Linf, Linf(1/t)) couple on the refinement grid
    WeightedCouple grid_couple() const;
};

Lemma2Iota lemma2_grid_iota(const std::vector<double>& x_values,
                            const SparseSequence& tau, int refine_per_step = 8);

// Lemma 3 projection for a p = 1 target: atoms are assigned to the block
// minimizing max(1, sigma_n/tau_k) rho(tau_k)/rho(sigma_n); every atom value
// must stay below coverage_c.
struct Lemma3Result {
    std::vector<long long> k_labels;
    Vec b;        // b_k = rho(tau_k) * beta_k(y)
    Matrix pi_m;  // rows: blocks, cols: atoms
    std::map<long long, std::vector<size_t>> partition_H;
    double worst_atom_value = 0.0;
};

class CoverageError : public std::runtime_error {
public:
    CoverageError(const std::string& what, size_t atom)
        : std::runtime_error(what), atom_index(atom) {}
    size_t atom_index;
};

Lemma3Result lemma3_pi(const WeightedCouple& target, const Vec& y,
                       const SparseSequence& tau, const QcFunction& rho,
                       double coverage_c = 2.0);

struct OvchReport {
    double c_base = 0.0;  // couple norm of T
    double c_rho = 0.0;   // exact norm with derived rho-weights on both sides
    double ratio = 0.0;   // c_rho / c_base
    double bound = 0.0;   // c_base * sum eps_m
    double eps_sum = 0.0;
    bool exact = true;
    bool pass = false;  // c_rho <= bound (+ tolerance)
};

OvchReport verify_ovchinnikov(const CoupleOperator& T, const QcFunction& rho,
                              double tol = 1e-9);

}  // namespace interpkit
