#pragma once

#include <map>
#include <string>
#include <vector>

#include "interpkit/couples.hpp"
#include "interpkit/retract.hpp"

namespace interpkit {

// x = sum_k parts[k], parts indexed by integer k
struct Representation {
    double lambda = 2.0;
    std::map<long long, Vec> parts;
    Vec target;

    long long k_min() const { return parts.begin()->first; }
    long long k_max() const { return parts.rbegin()->first; }
    // verifies sum of parts reproduces target within rel_tol
    void validate(double rel_tol = 1e-10) const;
};

// (Omega c)_j = sum_k min(1, lambda^(j-k)) c_k over the stored range
std::vector<double> calderon(const std::vector<double>& c, long long k_lo, double lambda);

// Block representation a_k = restriction of a to e_k of partition(c, lambda);
// guarantees J(lambda^k, a_k) <= lambda * K(lambda^k, a). l1 couples only.
Representation fundamental_representation(const WeightedCouple& c, const Vec& a,
                                          double lambda);

// measured C' = max_j Omega({J(lambda^k, parts_k)})_j / K(lambda^j, x);
// +inf when K vanishes under a nonzero Omega value.
double strong_form_check(const WeightedCouple& c, const Representation& rep, const Vec& x);

enum class GapMethod { Greedy, LpExact };

struct GapCertificate {
    double value = 0.0;
    bool infinite = false;
    Representation witness;
    GapMethod method = GapMethod::Greedy;
    bool lp_fell_back = false;
    long long k_lo = 0, k_hi = 0;
    std::string note;  // records the k-range truncation decision
};

// Minimizes sum_k J(lambda^k, y_k) / K(lambda^k, x) over representations of y.
// Greedy assigns each coordinate wholly to its best k (upper bound); the LP
// solves the relaxation exactly via the dense simplex.
GapCertificate jk_gap(const WeightedCouple& source, const Vec& x,
                      const WeightedCouple& target, const Vec& y, double lambda,
                      GapMethod method, bool use_surrogate_k = false,
                      int lp_size_cap = 2000);

struct OrderingReport {
    bool k_ordering = false;
    double k_constant = 0.0;  // max_k K(l^k,y)/K(l^k,x)
    bool bergh = false;
    double bergh_t = 0.0;  // witness t when the Bergh criterion holds
    double cwikel_sum = 0.0;
    bool cwikel_finite = true;
    double summability_r = 0.0;  // smallest grid r with sum c_k^r <= 1e6 (reported only)
};

OrderingReport ordering_checks(const WeightedCouple& source, const Vec& x,
                               const WeightedCouple& target, const Vec& y, double lambda);

// K denominators for the gap objective on a k-range
std::vector<double> gap_denominators(const WeightedCouple& source, const Vec& x,
                                     double lambda, long long k_lo, long long k_hi,
                                     bool use_surrogate);

// the k-range rule: weight-ratio range of the target, padded by one step
std::pair<long long, long long> gap_k_range(const WeightedCouple& target, double lambda);

}  // namespace interpkit
