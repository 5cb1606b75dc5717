#include "interpkit/nuclear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace interpkit {

void NuclearDecomposition::add_term(Vec l, Vec b) {
    bool b_zero = std::all_of(b.begin(), b.end(), [](double v) { return v == 0.0; });
    if (b_zero) return;
    for (double v : b) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("NuclearDecomposition: non-finite b entry");
        }
    }
    terms.push_back({std::move(l), std::move(b)});
}

Matrix NuclearDecomposition::induced_matrix(size_t target_dim, size_t source_dim) const {
    Matrix m(target_dim, source_dim);
    for (const auto& t : terms) {
        if (t.l.size() != source_dim || t.b.size() != target_dim) {
            throw std::invalid_argument("NuclearDecomposition: term dimension mismatch");
        }
        for (size_t j = 0; j < target_dim; ++j) {
            for (size_t k = 0; k < source_dim; ++k) {
                m.at(j, k) += t.b[j] * t.l[k];
            }
        }
    }
    return m;
}

double dual_norm(const WeightedCouple& c, int side, const Vec& l) {
    if (l.size() != c.size()) {
        throw std::invalid_argument("dual_norm: functional length mismatch");
    }
    const Vec& w = side == 0 ? c.w0 : c.w1;
    if (side != 0 && side != 1) throw std::invalid_argument("dual_norm: side must be 0 or 1");
    double q;
    if (c.p == kInf) {
        q = 1.0;
    } else if (c.p == 1.0) {
        q = kInf;
    } else {
        q = c.p / (c.p - 1.0);
    }
    if (q == kInf) {
        double m = 0.0;
        for (size_t n = 0; n < l.size(); ++n) m = std::max(m, std::fabs(l[n]) / w[n]);
        return m;
    }
    if (q == 1.0) {
        KahanSum s;
        for (size_t n = 0; n < l.size(); ++n) s.add(std::fabs(l[n]) / w[n]);
        return s.value();
    }
    KahanSum s;
    for (size_t n = 0; n < l.size(); ++n) s.add(std::pow(std::fabs(l[n]) / w[n], q));
    return std::pow(s.value(), 1.0 / q);
}

double nuclear_norm(const NuclearDecomposition& d, const WeightedCouple& source,
                    const WeightedCouple& target) {
    KahanSum total;
    for (const auto& t : d.terms) {
        double s0 = dual_norm(source, 0, t.l) * norm_side(target, 0, t.b);
        double s1 = dual_norm(source, 1, t.l) * norm_side(target, 1, t.b);
        total.add(std::max(s0, s1));
    }
    return total.value();
}

DecompToRepResult decomp_to_representation(const NuclearDecomposition& d, const Vec& x,
                                           double lambda, const WeightedCouple& source,
                                           const WeightedCouple& target) {
    if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) {
        throw std::domain_error("decomp_to_representation: x must be nonzero");
    }
    if (x.size() != source.size()) {
        throw std::invalid_argument("decomp_to_representation: x length mismatch");
    }
    DecompToRepResult out;
    out.rep.lambda = lambda;
    out.rep.target.assign(target.size(), 0.0);
    if (d.terms.empty()) {
        out.rep.parts[0] = Vec(target.size(), 0.0);
        out.bound = 0.0;
        out.gap_value = 0.0;
        return out;
    }
    double ll = std::log(lambda);
    for (const auto& t : d.terms) {
        double b0 = norm_side(target, 0, t.b);
        double b1 = norm_side(target, 1, t.b);
        // block index: ||b||_0 <= lambda^k ||b||_1 < lambda ||b||_0
        long long k = static_cast<long long>(std::ceil(std::log(b0 / b1) / ll - 1e-12));
        auto ok = [&](long long kk) {
            double lk = std::pow(lambda, static_cast<double>(kk));
            return b0 <= lk * b1 && lk * b1 < lambda * b0;
        };
        for (int step = 0; step < 4 && !ok(k); ++step) {
            double lk = std::pow(lambda, static_cast<double>(k));
            k += (b0 > lk * b1) ? 1 : -1;
        }
        KahanSum pairing;
        for (size_t n = 0; n < x.size(); ++n) pairing.add(t.l[n] * x[n]);
        double coef = pairing.value();
        auto& part = out.rep.parts[k];
        if (part.empty()) part.assign(target.size(), 0.0);
        for (size_t j = 0; j < target.size(); ++j) {
            part[j] += coef * t.b[j];
            out.rep.target[j] += coef * t.b[j];
        }
    }
    out.bound = lambda * nuclear_norm(d, source, target);
    KahanSum gap;
    for (const auto& [k, part] : out.rep.parts) {
        double t = std::pow(lambda, static_cast<double>(k));
        double j = j_functional(target, t, part);
        if (j == 0.0) continue;
        gap.add(j / k_exact(source, t, x));
    }
    out.gap_value = gap.value();
    return out;
}

NuclearDecomposition representation_to_decomp(const Representation& rep, const Vec& x,
                                              const WeightedCouple& source,
                                              const WeightedCouple& target,
                                              double lambda) {
    if (source.p != kInf) {
        throw std::invalid_argument(
            "representation_to_decomp: norming point masses need a p = inf source");
    }
    if (x.size() != source.size()) {
        throw std::invalid_argument("representation_to_decomp: x length mismatch");
    }
    NuclearDecomposition d;
    for (const auto& [k, part] : rep.parts) {
        bool part_zero = std::all_of(part.begin(), part.end(),
                                     [](double v) { return v == 0.0; });
        if (part_zero) continue;
        double t = std::pow(lambda, static_cast<double>(k));
        // argmax of min(w0, lambda^k w1)|x|, smallest index on ties
        size_t arg = source.size();
        double best = 0.0;
        for (size_t n = 0; n < source.size(); ++n) {
            double v = std::min(source.w0[n], t * source.w1[n]) * std::fabs(x[n]);
            if (v > best) {
                best = v;
                arg = n;
            }
        }
        if (arg == source.size() || best == 0.0) {
            throw std::domain_error(
                "representation_to_decomp: surrogate K vanishes under a nonzero part");
        }
        Vec l(source.size(), 0.0);
        l[arg] = 1.0 / x[arg];
        if (part.size() != target.size()) {
            throw std::invalid_argument("representation_to_decomp: part length mismatch");
        }
        d.add_term(std::move(l), part);
    }
    return d;
}

NuclearityReport nuclearity_equivalence_test(const WeightedCouple& source,
                                             const WeightedCouple& target, const Vec& x,
                                             const Vec& y, double lambda) {
    if (source.p != kInf || target.p != 1.0) {
        throw std::invalid_argument(
            "nuclearity_equivalence_test: needs p = inf source and p = 1 target");
    }
    NuclearityReport rep;
    bool y_zero = std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; });
    if (y_zero) {
        rep.gap_le_lambda_nu = rep.nu_le_two_gap = true;
        return rep;
    }
    GapCertificate cert = jk_gap(source, x, target, y, lambda, GapMethod::LpExact);
    rep.gap = cert.value;
    NuclearDecomposition d = representation_to_decomp(cert.witness, x, source, target, lambda);
    rep.nu = nuclear_norm(d, source, target);
    rep.factor_gap_over_nu = safe_ratio(rep.gap, rep.nu);
    rep.factor_nu_over_gap = safe_ratio(rep.nu, rep.gap);
    rep.gap_le_lambda_nu = rep.gap <= lambda * rep.nu * (1.0 + 1e-6);
    rep.nu_le_two_gap = rep.nu <= 2.0 * rep.gap * (1.0 + 1e-6);
    return rep;
}

}  // namespace interpkit
