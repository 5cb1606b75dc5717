#include "interpkit/retract.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace interpkit {

namespace {

// k with w0 <= lambda^k w1 < lambda w0, i.e. k = ceil(log_lambda(w0/w1)),
// computed from the log and then corrected by direct inequality checks.
long long block_index(double w0, double w1, double lambda) {
    double t = w0 / w1;
    long long k = static_cast<long long>(std::ceil(std::log(t) / std::log(lambda) - 1e-12));
    auto ok = [&](long long kk) {
        double lk = std::pow(lambda, static_cast<double>(kk));
        return w0 <= lk * w1 && lk * w1 < lambda * w0;
    };
    for (int step = 0; step < 4 && !ok(k); ++step) {
        double lk = std::pow(lambda, static_cast<double>(k));
        k += (w0 > lk * w1) ? 1 : -1;
    }
    if (!ok(k)) {
        throw std::runtime_error("partition: failed to locate block index");
    }
    return k;
}

}  // namespace

BlockPartition partition(const WeightedCouple& c, double lambda) {
    if (!(lambda > 1.0)) {
        throw std::invalid_argument("partition: lambda must exceed 1");
    }
    c.validate();
    BlockPartition part;
    part.lambda = lambda;
    part.phi.resize(c.size());
    for (size_t n = 0; n < c.size(); ++n) {
        long long k = block_index(c.w0[n], c.w1[n], lambda);
        part.phi[n] = k;
        part.blocks[k].push_back(n);
    }
    return part;
}

IotaResult iota(const WeightedCouple& c, const BlockPartition& part, const Vec& x) {
    if (x.size() != c.size()) {
        throw std::invalid_argument("iota: vector length does not match couple");
    }
    IotaResult out;
    for (const auto& [k, idx] : part.blocks) out.block_labels.push_back(k);
    const size_t K = out.block_labels.size();
    out.s.assign(K, 0.0);
    out.alpha = Matrix(K, c.size());

    for (size_t row = 0; row < K; ++row) {
        const auto& idx = part.blocks.at(out.block_labels[row]);
        // block norm s_k of w0 * x
        if (c.p == kInf) {
            size_t arg = idx.front();
            double best = -1.0;
            for (size_t n : idx) {
                double v = c.w0[n] * std::fabs(x[n]);
                if (v > best) {
                    best = v;
                    arg = n;
                }
            }
            out.s[row] = std::max(best, 0.0);
            // point mass witness at the block argmax
            double sg = x[arg] >= 0.0 ? 1.0 : -1.0;
            out.alpha.at(row, arg) = sg * c.w0[arg];
        } else if (c.p == 1.0) {
            KahanSum s;
            for (size_t n : idx) s.add(c.w0[n] * std::fabs(x[n]));
            out.s[row] = s.value();
            // sign vector witness
            for (size_t n : idx) {
                double sg = x[n] >= 0.0 ? 1.0 : -1.0;
                out.alpha.at(row, n) = sg * c.w0[n];
            }
        } else {
            KahanSum s;
            for (size_t n : idx) s.add(std::pow(c.w0[n] * std::fabs(x[n]), c.p));
            double sk = std::pow(s.value(), 1.0 / c.p);
            out.s[row] = sk;
            // dual-exponent normalized witness
            if (sk > 0.0) {
                for (size_t n : idx) {
                    double sg = x[n] >= 0.0 ? 1.0 : -1.0;
                    out.alpha.at(row, n) =
                        sg * c.w0[n] * std::pow(c.w0[n] * std::fabs(x[n]), c.p - 1.0) /
                        std::pow(sk, c.p - 1.0);
                }
            }
        }
    }
    return out;
}

Vec pi(const WeightedCouple& c, const BlockPartition& part, const Vec& x,
       const IotaResult& ir, const Vec& a) {
    if (x.size() != c.size()) {
        throw std::invalid_argument("pi: vector length does not match couple");
    }
    if (a.size() != ir.block_labels.size()) {
        throw std::invalid_argument("pi: block vector length does not match partition");
    }
    std::map<long long, size_t> row_of;
    for (size_t r = 0; r < ir.block_labels.size(); ++r) row_of[ir.block_labels[r]] = r;
    Vec y(c.size(), 0.0);
    for (size_t n = 0; n < c.size(); ++n) {
        if (x[n] == 0.0) continue;
        size_t r = row_of.at(part.phi[n]);
        if (ir.s[r] == 0.0) {
            throw std::domain_error("pi: zero block norm under a nonzero coordinate");
        }
        y[n] = a[r] * x[n] / ir.s[r];
    }
    return y;
}

RetractPair retract_pair(const WeightedCouple& c, const BlockPartition& part,
                         const std::vector<long long>& labels) {
    if (labels.empty()) {
        throw std::invalid_argument("retract_pair: empty label range");
    }
    RetractPair out;
    std::vector<size_t> rep;
    for (long long k : labels) {
        auto it = part.blocks.find(k);
        if (it == part.blocks.end() || it->second.empty()) {
            throw std::invalid_argument("retract_pair: empty block e_" + std::to_string(k) +
                                        " inside requested range");
        }
        out.block_labels.push_back(k);
        rep.push_back(*std::min_element(it->second.begin(), it->second.end()));
    }
    const size_t K = out.block_labels.size();
    out.iota_full = Matrix(c.size(), K);
    out.pi_full = Matrix(K, c.size());
    for (size_t r = 0; r < K; ++r) {
        size_t n = rep[r];
        out.iota_full.at(n, r) = 1.0 / c.w0[n];
        out.pi_full.at(r, n) = c.w0[n];
    }
    return out;
}

RetractPair retract_pair(const WeightedCouple& c, const BlockPartition& part,
                         long long k_lo, long long k_hi) {
    if (k_lo > k_hi) {
        throw std::invalid_argument("retract_pair: empty label range");
    }
    std::vector<long long> labels;
    for (long long k = k_lo; k <= k_hi; ++k) labels.push_back(k);
    return retract_pair(c, part, labels);
}

WeightedCouple block_couple(const std::vector<long long>& block_labels, double lambda,
                            double p) {
    WeightedCouple c;
    c.p = p;
    for (long long k : block_labels) {
        c.labels.push_back(k);
        c.w0.push_back(1.0);
        c.w1.push_back(std::pow(lambda, -static_cast<double>(k)));
    }
    c.validate();
    return c;
}

}  // namespace interpkit
