#pragma once

#include <map>
#include <vector>

#include "interpkit/couples.hpp"

namespace interpkit {

// Partition of the index set into blocks e_k = {n : w0_n <= lambda^k w1_n < lambda w0_n}.
struct BlockPartition {
    double lambda = 2.0;
    std::map<long long, std::vector<size_t>> blocks;  // k -> index positions
    std::vector<long long> phi;                       // index position -> k

    long long k_min() const { return blocks.begin()->first; }
    long long k_max() const { return blocks.rbegin()->first; }
};

BlockPartition partition(const WeightedCouple& c, double lambda);

// Partial-retract section: s_k = block lp norm of w0 * x, together with the
// explicit duality witnesses alpha_k (rows of a matrix over the index set)
// realizing alpha_k(x) = s_k with block norm <= 1.
struct IotaResult {
    std::vector<long long> block_labels;  // sorted k values, one per row
    Vec s;                                // s_k = alpha_k(x)
    Matrix alpha;                         // rows: blocks, cols: index set
};

IotaResult iota(const WeightedCouple& c, const BlockPartition& part, const Vec& x);

// pi(a)_n = a_{phi_n} * x_n / s_{phi_n}; requires s != 0 on every block that
// carries a nonzero coordinate of x. Composing with iota of the same x gives
// back x exactly.
Vec pi(const WeightedCouple& c, const BlockPartition& part, const Vec& x,
       const IotaResult& ir, const Vec& a);

// x-independent retract pair onto the lambda-adic couple over [k_lo, k_hi]:
// one representative index per block (smallest index), pi_full * iota_full = id.
// Every k in range must own a nonempty block.
struct RetractPair {
    std::vector<long long> block_labels;
    Matrix iota_full;  // block labels -> index set
    Matrix pi_full;    // index set -> block labels
};

RetractPair retract_pair(const WeightedCouple& c, const BlockPartition& part,
                         const std::vector<long long>& labels);
RetractPair retract_pair(const WeightedCouple& c, const BlockPartition& part,
                         long long k_lo, long long k_hi);

// lambda-adic couple matching an IotaResult/RetractPair row set
WeightedCouple block_couple(const std::vector<long long>& block_labels, double lambda,
                            double p);

}  // namespace interpkit
