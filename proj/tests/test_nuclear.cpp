#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "interpkit/nuclear.hpp"

using namespace interpkit;

namespace {

WeightedCouple make_couple(std::vector<double> w0, std::vector<double> w1, double p) {
    WeightedCouple c;
    for (size_t n = 0; n < w0.size(); ++n) c.labels.push_back(static_cast<long long>(n));
    c.w0 = std::move(w0);
    c.w1 = std::move(w1);
    c.p = p;
    c.validate();
    return c;
}

struct TestRng {
    uint64_t s;
    explicit TestRng(uint64_t seed) : s(seed) {}
    uint64_t next() {
        uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
};

}  // namespace

TEST_CASE("dual norms") {
    // dual of linf(w) is l1(1/w); dual of l1(w) is linf(1/w)
    WeightedCouple sup_c = make_couple({2, 4}, {1, 1}, kInf);
    CHECK(dual_norm(sup_c, 0, {1, 1}) == doctest::Approx(0.5 + 0.25).epsilon(1e-14));
    WeightedCouple sum_c = make_couple({2, 4}, {1, 1}, 1.0);
    CHECK(dual_norm(sum_c, 0, {1, 1}) == doctest::Approx(0.5).epsilon(1e-14));
    WeightedCouple p2 = make_couple({1, 1}, {1, 1}, 2.0);
    CHECK(dual_norm(p2, 0, {3, 4}) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("nuclear norm") {
    SUBCASE("unit rank-one term") {
        NuclearDecomposition d;
        d.add_term({1}, {1});
        WeightedCouple source = make_couple({1}, {1}, kInf);
        WeightedCouple target = make_couple({1}, {1}, 1.0);
        CHECK(nuclear_norm(d, source, target) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("empty decomposition") {
        NuclearDecomposition d;
        CHECK(nuclear_norm(d, make_couple({1}, {1}, kInf), make_couple({1}, {1}, 1.0)) ==
              0.0);
    }
    SUBCASE("weighted single-coordinate arithmetic") {
        NuclearDecomposition d;
        d.add_term({1}, {1});
        WeightedCouple source = make_couple({2}, {1}, kInf);
        WeightedCouple target = make_couple({3}, {1}, 1.0);
        CHECK(nuclear_norm(d, source, target) == doctest::Approx(1.5).epsilon(1e-14));
    }
    SUBCASE("zero b terms are dropped") {
        NuclearDecomposition d;
        d.add_term({1, 2}, {0, 0});
        CHECK(d.terms.empty());
    }
}

TEST_CASE("operator norm below nuclear norm") {
    TestRng rng(7);
    for (int inst = 0; inst < 200; ++inst) {
        size_t ns = 1 + rng.next() % 5, nt = 1 + rng.next() % 5;
        Vec w0s(ns), w1s(ns), w0t(nt), w1t(nt);
        for (size_t i = 0; i < ns; ++i) {
            w0s[i] = std::exp(rng.range(-1, 1));
            w1s[i] = std::exp(rng.range(-1, 1));
        }
        for (size_t i = 0; i < nt; ++i) {
            w0t[i] = std::exp(rng.range(-1, 1));
            w1t[i] = std::exp(rng.range(-1, 1));
        }
        WeightedCouple source = make_couple(w0s, w1s, kInf);
        WeightedCouple target = make_couple(w0t, w1t, 1.0);
        NuclearDecomposition d;
        size_t terms = 1 + rng.next() % 4;
        for (size_t tIdx = 0; tIdx < terms; ++tIdx) {
            Vec l(ns), b(nt);
            for (auto& v : l) v = rng.range(-1, 1);
            for (auto& v : b) v = rng.range(-1, 1);
            d.add_term(std::move(l), std::move(b));
        }
        CoupleOperator T;
        T.source = source;
        T.target = target;
        T.m = d.induced_matrix(nt, ns);
        CHECK(couple_opnorm(T).value <= nuclear_norm(d, source, target) + 1e-9);
    }
}

TEST_CASE("separately summable sides can undersell the joint norm") {
    // two rank-one terms whose side sums stay near 1 while the max-sum is
    // pinned near 2: the joint norm is not controlled by either side alone
    double eps = 0.05;
    WeightedCouple source = make_couple({1, 1}, {1, 1}, kInf);
    WeightedCouple target = make_couple({1, eps}, {eps, 1}, 1.0);
    NuclearDecomposition d;
    d.add_term({1, 0}, {1, 0});
    d.add_term({0, 1}, {0, 1});
    double side0 = 0.0, side1 = 0.0;
    for (const auto& t : d.terms) {
        side0 += dual_norm(source, 0, t.l) * norm_side(target, 0, t.b);
        side1 += dual_norm(source, 1, t.l) * norm_side(target, 1, t.b);
    }
    double nu = nuclear_norm(d, source, target);
    CHECK(side0 <= nu + 1e-12);
    CHECK(side1 <= nu + 1e-12);
    CHECK(nu >= 1.9 * std::max(side0, side1) / (1.0 + eps) - 1e-12);
    CHECK(nu / std::max(side0, side1) >= 1.9);
}

TEST_CASE("decomposition to representation") {
    SUBCASE("single term lands at its ratio block") {
        WeightedCouple source = make_couple({1}, {1}, kInf);
        WeightedCouple target = make_couple({1}, {1}, 1.0);
        NuclearDecomposition d;
        d.add_term({1}, {1});
        DecompToRepResult r = decomp_to_representation(d, {1}, 2.0, source, target);
        REQUIRE(r.rep.parts.count(0) == 1);
        CHECK(r.gap_value <= r.bound + 1e-12);
    }
    SUBCASE("empty decomposition gives the zero representation") {
        WeightedCouple source = make_couple({1}, {1}, kInf);
        WeightedCouple target = make_couple({1}, {1}, 1.0);
        NuclearDecomposition d;
        DecompToRepResult r = decomp_to_representation(d, {1}, 2.0, source, target);
        CHECK(r.gap_value == 0.0);
        CHECK(r.bound == 0.0);
    }
    SUBCASE("ratio lambda squared lands two blocks up") {
        WeightedCouple source = make_couple({1}, {1}, kInf);
        WeightedCouple target = make_couple({1, 4}, {1, 1}, 1.0);
        NuclearDecomposition d;
        d.add_term({1}, {1, 0});  // ratio 1 -> k=0
        d.add_term({1}, {0, 1});  // ratio 4 -> k=2
        DecompToRepResult r = decomp_to_representation(d, {1}, 2.0, source, target);
        CHECK(r.rep.parts.count(0) == 1);
        CHECK(r.rep.parts.count(2) == 1);
    }
    SUBCASE("zero x is rejected") {
        WeightedCouple source = make_couple({1}, {1}, kInf);
        WeightedCouple target = make_couple({1}, {1}, 1.0);
        NuclearDecomposition d;
        d.add_term({1}, {1});
        CHECK_THROWS_AS(decomp_to_representation(d, {0}, 2.0, source, target),
                        std::domain_error);
    }
    SUBCASE("per-term pairing inequality") {
        TestRng rng(13);
        double lambda = 2.0;
        for (int inst = 0; inst < 50; ++inst) {
            size_t ns = 1 + rng.next() % 4, nt = 1 + rng.next() % 4;
            Vec w0s(ns), w1s(ns), w0t(nt), w1t(nt), l(ns), b(nt);
            for (size_t i = 0; i < ns; ++i) {
                w0s[i] = std::exp(rng.range(-1, 1));
                w1s[i] = std::exp(rng.range(-1, 1));
                l[i] = rng.range(-1, 1);
            }
            for (size_t i = 0; i < nt; ++i) {
                w0t[i] = std::exp(rng.range(-1, 1));
                w1t[i] = std::exp(rng.range(-1, 1));
                b[i] = rng.range(0.2, 1.0);
            }
            WeightedCouple source = make_couple(w0s, w1s, kInf);
            WeightedCouple target = make_couple(w0t, w1t, 1.0);
            double b0 = norm_side(target, 0, b), b1 = norm_side(target, 1, b);
            long long k = static_cast<long long>(
                std::ceil(std::log(b0 / b1) / std::log(lambda) - 1e-12));
            double t = std::pow(lambda, static_cast<double>(k));
            // J of the functional in the dual couple at lambda^{-k}
            double jl = std::max(dual_norm(source, 0, l),
                                 (1.0 / t) * dual_norm(source, 1, l));
            double jb = std::max(b0, t * b1);
            double rhs = std::max(dual_norm(source, 0, l) * b0,
                                  dual_norm(source, 1, l) * b1);
            CHECK(jl * jb <= lambda * rhs + 1e-9);
        }
    }
}

TEST_CASE("representation to decomposition") {
    SUBCASE("single block single coordinate") {
        WeightedCouple source = make_couple({1}, {1}, kInf);
        WeightedCouple target = make_couple({1, 1}, {1, 1}, 1.0);
        Representation rep;
        rep.lambda = 2.0;
        rep.parts[0] = {0.5, 0.25};
        rep.target = {0.5, 0.25};
        NuclearDecomposition d = representation_to_decomp(rep, {1}, source, target, 2.0);
        REQUIRE(d.terms.size() == 1);
        CHECK(nuclear_norm(d, source, target) ==
              doctest::Approx(j_functional(target, 1.0, rep.parts[0])).epsilon(1e-12));
    }
    SUBCASE("zero representation gives the empty decomposition") {
        WeightedCouple source = make_couple({1}, {1}, kInf);
        WeightedCouple target = make_couple({1}, {1}, 1.0);
        Representation rep;
        rep.lambda = 2.0;
        rep.parts[0] = {0.0};
        rep.target = {0.0};
        NuclearDecomposition d = representation_to_decomp(rep, {1}, source, target, 2.0);
        CHECK(d.terms.empty());
    }
    SUBCASE("functionals pair to one against x") {
        WeightedCouple source = make_couple({1, 2}, {2, 1}, kInf);
        WeightedCouple target = make_couple({1, 1}, {1, 1}, 1.0);
        Representation rep;
        rep.lambda = 2.0;
        rep.parts[0] = {0.3, 0.0};
        rep.parts[1] = {0.0, 0.7};
        rep.target = {0.3, 0.7};
        Vec x = {1.5, -0.5};
        NuclearDecomposition d = representation_to_decomp(rep, x, source, target, 2.0);
        for (const auto& term : d.terms) {
            double pairing = 0.0;
            for (size_t i = 0; i < x.size(); ++i) pairing += term.l[i] * x[i];
            CHECK(pairing == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("nuclearity equivalence") {
    SUBCASE("zero y") {
        WeightedCouple source = make_couple({1}, {1}, kInf);
        WeightedCouple target = make_couple({1}, {1}, 1.0);
        NuclearityReport rep = nuclearity_equivalence_test(source, target, {1}, {0}, 2.0);
        CHECK(rep.gap == 0.0);
        CHECK(rep.nu == 0.0);
        CHECK(rep.gap_le_lambda_nu);
        CHECK(rep.nu_le_two_gap);
    }
    SUBCASE("single coordinate identity collapses both to one") {
        WeightedCouple source = make_couple({1}, {1}, kInf);
        WeightedCouple target = make_couple({1}, {1}, 1.0);
        NuclearityReport rep = nuclearity_equivalence_test(source, target, {1}, {1}, 2.0);
        CHECK(rep.gap == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(rep.nu == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("random instances satisfy both certified inequalities") {
        TestRng rng(29);
        for (int inst = 0; inst < 100; ++inst) {
            size_t ns = 2 + rng.next() % 3, nt = 2 + rng.next() % 3;
            Vec w0s(ns), w1s(ns), xs(ns), w0t(nt), w1t(nt), yt(nt);
            for (size_t i = 0; i < ns; ++i) {
                w0s[i] = std::exp(rng.range(-1.5, 1.5));
                w1s[i] = std::exp(rng.range(-1.5, 1.5));
                xs[i] = rng.range(0.4, 2.0) * (rng.next() % 2 ? 1.0 : -1.0);
            }
            for (size_t i = 0; i < nt; ++i) {
                w0t[i] = std::exp(rng.range(-1.5, 1.5));
                w1t[i] = std::exp(rng.range(-1.5, 1.5));
                yt[i] = rng.range(-2, 2);
            }
            WeightedCouple source = make_couple(w0s, w1s, kInf);
            WeightedCouple target = make_couple(w0t, w1t, 1.0);
            NuclearityReport rep =
                nuclearity_equivalence_test(source, target, xs, yt, 2.0);
            CHECK(rep.gap_le_lambda_nu);
            CHECK(rep.nu_le_two_gap);
        }
    }
    SUBCASE("round trip distortion stays below two lambda") {
        TestRng rng(43);
        double lambda = 2.0;
        for (int inst = 0; inst < 100; ++inst) {
            WeightedCouple source = make_couple({1}, {1}, kInf);
            size_t nt = 1 + rng.next() % 3;
            Vec w0t(nt), w1t(nt), b(nt);
            for (size_t i = 0; i < nt; ++i) {
                w0t[i] = std::exp(rng.range(-1, 1));
                w1t[i] = std::exp(rng.range(-1, 1));
                b[i] = rng.range(-1, 1);
            }
            WeightedCouple target = make_couple(w0t, w1t, 1.0);
            NuclearDecomposition d;
            d.add_term({rng.range(0.5, 1.5)}, b);
            if (d.terms.empty()) continue;
            Vec x = {1.0};
            DecompToRepResult fwd = decomp_to_representation(d, x, lambda, source, target);
            NuclearDecomposition back =
                representation_to_decomp(fwd.rep, x, source, target, lambda);
            double nu0 = nuclear_norm(d, source, target);
            double nu1 = nuclear_norm(back, source, target);
            CHECK(nu1 <= 2.0 * lambda * nu0 * (1.0 + 1e-9));
        }
    }
}
