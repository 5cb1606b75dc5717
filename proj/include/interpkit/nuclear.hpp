#pragma once

#include <vector>

#include "interpkit/couples.hpp"
#include "interpkit/repr.hpp"

namespace interpkit {

// Finite rank-one decomposition a -> sum_n <l_n, a> b_n via the standard
// pairing; terms with b = 0 are dropped on construction.
struct NuclearDecomposition {
    struct Term {
        Vec l;  // over the source index set
        Vec b;  // over the target index set
    };
    std::vector<Term> terms;

    void add_term(Vec l, Vec b);
    Matrix induced_matrix(size_t target_dim, size_t source_dim) const;
};

// dual norm of the functional l on side i of the couple: lq(1/w) with
// 1/p + 1/q = 1
double dual_norm(const WeightedCouple& c, int side, const Vec& l);

// sum_n max(||l_n||_{X0'}||b_n||_{Y0}, ||l_n||_{X1'}||b_n||_{Y1})
double nuclear_norm(const NuclearDecomposition& d, const WeightedCouple& source,
                    const WeightedCouple& target);

struct DecompToRepResult {
    Representation rep;   // represents Tx
    double bound = 0.0;   // lambda * nuclear_norm(d)
    double gap_value = 0.0;  // sum_k J(lambda^k, y_k) / K(lambda^k, x), exact K
};

// Blocks terms by the ratio ||b||_{Y0}/||b||_{Y1}; the certified inequality is
// gap_value <= bound.
DecompToRepResult decomp_to_representation(const NuclearDecomposition& d, const Vec& x,
                                           double lambda, const WeightedCouple& source,
                                           const WeightedCouple& target);

// Converse construction via surrogate-K norming point masses l_k at the
// argmax coordinate of min(w0, lambda^k w1)|x|, scaled so <l_k, x> = 1.
NuclearDecomposition representation_to_decomp(const Representation& rep, const Vec& x,
                                              const WeightedCouple& source,
                                              const WeightedCouple& target,
                                              double lambda);

struct NuclearityReport {
    double gap = 0.0;          // jk_gap lp value
    double nu = 0.0;           // nuclear norm of the constructed decomposition
    double factor_gap_over_nu = 0.0;
    double factor_nu_over_gap = 0.0;
    bool gap_le_lambda_nu = false;  // gap <= lambda * nu * (1 + 1e-6)
    bool nu_le_two_gap = false;     // nu <= 2 * gap * (1 + 1e-6)
};

NuclearityReport nuclearity_equivalence_test(const WeightedCouple& source,
                                             const WeightedCouple& target, const Vec& x,
                                             const Vec& y, double lambda);

}  // namespace interpkit
