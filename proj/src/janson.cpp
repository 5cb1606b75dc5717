#include "interpkit/janson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace interpkit {

double EpsilonProfile::at(long long m) const {
    if (m < m_min || m > m_max) {
        throw std::out_of_range("EpsilonProfile::at: m outside realized range");
    }
    return values[static_cast<size_t>(m - m_min)];
}

Matrix scaled_matrix(const CoupleOperator& T) {
    T.validate();
    Matrix A(T.m.rows, T.m.cols);
    for (size_t j = 0; j < T.m.rows; ++j) {
        for (size_t k = 0; k < T.m.cols; ++k) {
            double s = std::max(T.target.w0[j] / T.source.w0[k],
                                T.target.w1[j] / T.source.w1[k]);
            A.at(j, k) = s * T.m.at(j, k);
        }
    }
    return A;
}

std::map<long long, double> diagonal_sums(const Matrix& A,
                                          const std::vector<long long>& row_labels,
                                          const std::vector<long long>& col_labels) {
    if (row_labels.size() != A.rows || col_labels.size() != A.cols) {
        throw std::invalid_argument("diagonal_sums: label lengths do not match matrix");
    }
    std::map<long long, KahanSum> acc;
    for (size_t j = 0; j < A.rows; ++j) {
        for (size_t k = 0; k < A.cols; ++k) {
            acc[row_labels[j] - col_labels[k]].add(std::fabs(A.at(j, k)));
        }
    }
    std::map<long long, double> out;
    for (const auto& [m, s] : acc) out[m] = s.value();
    return out;
}

namespace {

EpsilonProfile finalize_profile(std::map<long long, double>&& tight) {
    EpsilonProfile p;
    if (tight.empty()) {
        p.convergent = true;
        return p;
    }
    p.m_min = tight.begin()->first;
    p.m_max = tight.rbegin()->first;
    KahanSum s;
    for (long long m = p.m_min; m <= p.m_max; ++m) {
        auto it = tight.find(m);
        double v = (it == tight.end()) ? 0.0 : it->second;
        p.values.push_back(v);
        s.add(v);
    }
    p.sum = s.value();
    p.convergent = std::isfinite(p.sum);
    return p;
}

}  // namespace

EpsilonProfile epsilon_profile(const WeightedCouple& source, const WeightedCouple& target) {
    std::map<long long, double> tight;
    for (size_t j = 0; j < target.size(); ++j) {
        for (size_t k = 0; k < source.size(); ++k) {
            long long m = target.labels[j] - source.labels[k];
            double v = std::min(source.w0[k] / target.w0[j], source.w1[k] / target.w1[j]);
            auto [it, fresh] = tight.emplace(m, v);
            if (!fresh) it->second = std::max(it->second, v);
        }
    }
    return finalize_profile(std::move(tight));
}

EpsilonProfile epsilon_profile_rho(const std::vector<double>& tau,
                                   const std::vector<long long>& tau_labels,
                                   const std::vector<double>& sigma,
                                   const std::vector<long long>& sigma_labels,
                                   const QcFunction& rho, const QcFunction& lam) {
    if (tau.size() != tau_labels.size() || sigma.size() != sigma_labels.size()) {
        throw std::invalid_argument("epsilon_profile_rho: label lengths mismatch");
    }
    std::map<long long, double> tight;
    for (size_t k = 0; k < tau.size(); ++k) {
        for (size_t j = 0; j < sigma.size(); ++j) {
            long long m = tau_labels[k] - sigma_labels[j];
            double v = std::min(1.0, sigma[j] / tau[k]) * rho(tau[k]) / lam(sigma[j]);
            auto [it, fresh] = tight.emplace(m, v);
            if (!fresh) it->second = std::max(it->second, v);
        }
    }
    return finalize_profile(std::move(tight));
}

Lemma1Result lemma1_bound(const CoupleOperator& T, const EpsilonProfile& profile) {
    Lemma1Result out;
    OpNorm base = couple_opnorm(T);
    Matrix A = scaled_matrix(T);
    OpNorm sn = opnorm_inf_to_1(A, Vec(A.cols, 1.0), Vec(A.rows, 1.0));
    out.scaled_norm = sn.value;
    out.exact = base.exact && sn.exact;
    if (!profile.convergent) {
        out.bound = kInf;
        return out;
    }
    out.bound = base.value * profile.sum;
    // explicit point-mass nuclear decomposition of T between the unweighted
    // endpoint spaces
    for (size_t j = 0; j < T.m.rows; ++j) {
        for (size_t k = 0; k < T.m.cols; ++k) {
            if (T.m.at(j, k) == 0.0) continue;
            Vec l(T.m.cols, 0.0);
            l[k] = T.m.at(j, k);
            Vec b(T.m.rows, 0.0);
            b[j] = 1.0;
            out.decomp.add_term(std::move(l), std::move(b));
        }
    }
    return out;
}

Vec Lemma2Iota::apply(const Vec& b) const {
    if (b.size() != tau.size()) {
        throw std::invalid_argument("Lemma2Iota::apply: sequence length mismatch");
    }
    Vec out(refine.size(), 0.0);
    for (size_t i = 0; i < refine.size(); ++i) {
        double t = refine[i];
        if (t <= tau.front()) {
            out[i] = b.front();
            continue;
        }
        if (t >= tau.back()) {
            out[i] = b.back();
            continue;
        }
        size_t k = static_cast<size_t>(
            std::upper_bound(tau.begin(), tau.end(), t) - tau.begin()) - 1;
        double th = (t - tau[k]) / (tau[k + 1] - tau[k]);
        out[i] = (1.0 - th) * b[k] + th * b[k + 1];
    }
    return out;
}

WeightedCouple Lemma2Iota::grid_couple() const {
    WeightedCouple c;
    c.p = kInf;
    for (size_t i = 0; i < refine.size(); ++i) {
        c.labels.push_back(static_cast<long long>(i));
        c.w0.push_back(1.0);
        c.w1.push_back(1.0 / refine[i]);
    }
    c.validate();
    return c;
}

Lemma2Iota lemma2_grid_iota(const std::vector<double>& x_values, const SparseSequence& tau,
                            int refine_per_step) {
    if (x_values.size() != tau.tau.size()) {
        throw std::invalid_argument("lemma2_grid_iota: sample count must match tau grid");
    }
    for (size_t i = 1; i < tau.tau.size(); ++i) {
        if (!(tau.tau[i] > tau.tau[i - 1])) {
            throw std::invalid_argument("lemma2_grid_iota: tau must be strictly increasing");
        }
    }
    Lemma2Iota io;
    io.tau = tau.tau;
    io.a = x_values;
    io.refine.push_back(io.tau.front());
    for (size_t i = 0; i + 1 < io.tau.size(); ++i) {
        for (int r = 1; r <= refine_per_step; ++r) {
            double th = static_cast<double>(r) / refine_per_step;
            io.refine.push_back(io.tau[i] + th * (io.tau[i + 1] - io.tau[i]));
        }
    }
    return io;
}

Lemma3Result lemma3_pi(const WeightedCouple& target, const Vec& y,
                       const SparseSequence& tau, const QcFunction& rho,
                       double coverage_c) {
    if (target.p != 1.0) {
        throw std::invalid_argument("lemma3_pi: target must have p = 1");
    }
    if (y.size() != target.size()) {
        throw std::invalid_argument("lemma3_pi: vector length mismatch");
    }
    Lemma3Result out;
    for (int k = tau.k_min; k <= tau.k_max; ++k) out.k_labels.push_back(k);
    const size_t K = out.k_labels.size();
    out.pi_m = Matrix(K, target.size());

    for (size_t n = 0; n < target.size(); ++n) {
        double sigma = target.tau(n);
        double rs = rho(sigma);
        size_t best_row = 0;
        double best_val = kInf;
        for (size_t r = 0; r < K; ++r) {
            double tk = tau.at(static_cast<int>(out.k_labels[r]));
            double val = std::max(1.0, sigma / tk) * rho(tk) / rs;
            if (val < best_val) {
                best_val = val;
                best_row = r;
            }
        }
        if (best_val > coverage_c * (1.0 + 1e-12)) {
            throw CoverageError("lemma3_pi: coverage value " + std::to_string(best_val) +
                                    " exceeds C at atom " + std::to_string(n),
                                n);
        }
        out.worst_atom_value = std::max(out.worst_atom_value, best_val);
        out.partition_H[out.k_labels[best_row]].push_back(n);
        double tk = tau.at(static_cast<int>(out.k_labels[best_row]));
        double sg = y[n] >= 0.0 ? 1.0 : -1.0;
        out.pi_m.at(best_row, n) = rho(tk) * sg * target.w0[n] / rs;
    }
    out.b = interpkit::apply(out.pi_m, y);
    return out;
}

OvchReport verify_ovchinnikov(const CoupleOperator& T, const QcFunction& rho, double tol) {
    T.validate();
    if (T.source.p != kInf || T.target.p != 1.0) {
        throw std::invalid_argument("verify_ovchinnikov: needs p = inf source, p = 1 target");
    }
    OvchReport rep;
    OpNorm base = couple_opnorm(T);
    rep.c_base = base.value;

    Vec u = derived_weight(rho, T.source.w0, T.source.w1);
    Vec v = derived_weight(rho, T.target.w0, T.target.w1);
    OpNorm rn = opnorm_inf_to_1(T.m, u, v);
    rep.c_rho = rn.value;
    rep.exact = base.exact && rn.exact;
    rep.ratio = safe_ratio(rep.c_rho, rep.c_base);

    std::vector<double> tau_vals, sigma_vals;
    for (size_t n = 0; n < T.source.size(); ++n) tau_vals.push_back(T.source.tau(n));
    for (size_t n = 0; n < T.target.size(); ++n) sigma_vals.push_back(T.target.tau(n));
    EpsilonProfile prof = epsilon_profile_rho(tau_vals, T.source.labels, sigma_vals,
                                              T.target.labels, rho, rho);
    rep.eps_sum = prof.sum;
    rep.bound = prof.convergent ? rep.c_base * prof.sum : kInf;
    rep.pass = rep.c_rho <= rep.bound + tol;
    return rep;
}

}  // namespace interpkit
