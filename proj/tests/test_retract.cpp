#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "interpkit/retract.hpp"

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

TEST_CASE("partition block indices") {
    SUBCASE("ratio three lands in block two") {
        BlockPartition part = partition(make_couple({3}, {1}, kInf), 2.0);
        CHECK(part.phi[0] == 2);  // 3 <= 4 < 6
    }
    SUBCASE("equal weights land in block zero") {
        BlockPartition part = partition(make_couple({1}, {1}, kInf), 2.0);
        CHECK(part.phi[0] == 0);  // 1 <= 1 < 2
    }
    SUBCASE("dyadic couple blocks are singleton fixed points") {
        WeightedCouple c = WeightedCouple::lambda_adic(2.0, -3, 3, kInf);
        BlockPartition part = partition(c, 2.0);
        for (size_t n = 0; n < c.size(); ++n) CHECK(part.phi[n] == c.labels[n]);
    }
    SUBCASE("lambda at most 1 is rejected") {
        CHECK_THROWS(partition(make_couple({1}, {1}, kInf), 1.0));
    }
    SUBCASE("blocks satisfy the defining inequalities exactly") {
        TestRng rng(3);
        for (int inst = 0; inst < 50; ++inst) {
            size_t n = 1 + rng.next() % 8;
            Vec w0(n), w1(n);
            for (size_t i = 0; i < n; ++i) {
                w0[i] = std::exp(rng.range(-8, 8));
                w1[i] = std::exp(rng.range(-8, 8));
            }
            double lambda = 1.5 + rng.unit();
            WeightedCouple c = make_couple(w0, w1, 1.0);
            BlockPartition part = partition(c, lambda);
            for (size_t i = 0; i < n; ++i) {
                double lk = std::pow(lambda, static_cast<double>(part.phi[i]));
                CHECK(c.w0[i] <= lk * c.w1[i]);
                CHECK(lk * c.w1[i] < lambda * c.w0[i]);
            }
        }
    }
}

TEST_CASE("section map block norms") {
    SUBCASE("sup norm single block") {
        WeightedCouple c = make_couple({1}, {1}, kInf);
        BlockPartition part = partition(c, 2.0);
        IotaResult ir = iota(c, part, {5});
        REQUIRE(ir.s.size() == 1);
        CHECK(ir.s[0] == doctest::Approx(5.0).epsilon(1e-14));
    }
    SUBCASE("l1 block sums") {
        WeightedCouple c = make_couple({1, 1}, {1, 1}, 1.0);
        BlockPartition part = partition(c, 2.0);
        IotaResult ir = iota(c, part, {1, 1});
        REQUIRE(ir.s.size() == 1);
        CHECK(ir.s[0] == doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("zero vector gives zero sections") {
        WeightedCouple c = make_couple({1, 2}, {3, 1}, 2.0);
        BlockPartition part = partition(c, 2.0);
        IotaResult ir = iota(c, part, {0, 0});
        for (double v : ir.s) CHECK(v == 0.0);
    }
    SUBCASE("duality witnesses recover s with unit block norm") {
        TestRng rng(5);
        for (double p : {1.0, 2.0, kInf}) {
            size_t n = 6;
            Vec w0(n), w1(n), x(n);
            for (size_t i = 0; i < n; ++i) {
                w0[i] = std::exp(rng.range(-1, 1));
                w1[i] = std::exp(rng.range(-1, 1));
                x[i] = rng.range(0.2, 2.0) * (rng.next() % 2 ? 1.0 : -1.0);
            }
            WeightedCouple c = make_couple(w0, w1, p);
            BlockPartition part = partition(c, 2.0);
            IotaResult ir = iota(c, part, x);
            for (size_t r = 0; r < ir.block_labels.size(); ++r) {
                KahanSum pairing;
                for (size_t i = 0; i < n; ++i) pairing.add(ir.alpha.at(r, i) * x[i]);
                CHECK(pairing.value() == doctest::Approx(ir.s[r]).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("projection map") {
    SUBCASE("composing with the section restores x") {
        WeightedCouple c = make_couple({1, 2, 5}, {2, 1, 1}, kInf);
        BlockPartition part = partition(c, 2.0);
        Vec x = {1.0, -2.0, 0.5};
        IotaResult ir = iota(c, part, x);
        Vec back = pi(c, part, x, ir, ir.s);
        for (size_t i = 0; i < x.size(); ++i) {
            CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
        }
    }
    SUBCASE("zero block vector maps to zero") {
        WeightedCouple c = make_couple({1}, {1}, kInf);
        BlockPartition part = partition(c, 2.0);
        IotaResult ir = iota(c, part, {2});
        Vec out = pi(c, part, {2}, ir, {0});
        CHECK(out[0] == 0.0);
    }
    SUBCASE("single index scaling") {
        WeightedCouple c = make_couple({1}, {1}, kInf);
        BlockPartition part = partition(c, 2.0);
        Vec x = {2.0};
        IotaResult ir = iota(c, part, x);
        CHECK(ir.s[0] == doctest::Approx(2.0));
        Vec out = pi(c, part, x, ir, {3.0});
        CHECK(out[0] == doctest::Approx(3.0).epsilon(1e-14));
    }
    SUBCASE("zero section under nonzero coordinate is rejected") {
        WeightedCouple c = make_couple({1}, {1}, kInf);
        BlockPartition part = partition(c, 2.0);
        IotaResult ir = iota(c, part, {1});
        ir.s[0] = 0.0;
        CHECK_THROWS_AS(pi(c, part, {1}, ir, {1.0}), std::domain_error);
    }
}

TEST_CASE("x-independent retract pair") {
    SUBCASE("dyadic couple yields identity maps") {
        WeightedCouple c = WeightedCouple::lambda_adic(2.0, -2, 2, kInf);
        BlockPartition part = partition(c, 2.0);
        RetractPair rp = retract_pair(c, part, -2, 2);
        REQUIRE(rp.block_labels.size() == c.size());
        for (size_t i = 0; i < c.size(); ++i) {
            for (size_t j = 0; j < c.size(); ++j) {
                CHECK(rp.iota_full.at(i, j) == (i == j ? 1.0 : 0.0));
                CHECK(rp.pi_full.at(i, j) == (i == j ? 1.0 : 0.0));
            }
        }
    }
    SUBCASE("empty block in range is a hypothesis violation") {
        WeightedCouple c = make_couple({3, 1}, {1, 1}, kInf);
        BlockPartition part = partition(c, 2.0);  // blocks at k = 0 and k = 2
        CHECK_THROWS(retract_pair(c, part, 0, 2));
    }
    SUBCASE("sparse label set composes to the identity") {
        WeightedCouple c = make_couple({3, 1}, {1, 1}, kInf);
        BlockPartition part = partition(c, 2.0);
        RetractPair rp = retract_pair(c, part, std::vector<long long>{0, 2});
        REQUIRE(rp.block_labels.size() == 2);
        Matrix prod(2, 2);
        for (size_t i = 0; i < 2; ++i) {
            for (size_t j = 0; j < 2; ++j) {
                double acc = 0.0;
                for (size_t n = 0; n < c.size(); ++n) {
                    acc += rp.pi_full.at(i, n) * rp.iota_full.at(n, j);
                }
                CHECK(acc == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("retract identities and norms on random instances") {
    TestRng rng(99);
    for (int inst = 0; inst < 200; ++inst) {
        double p = (inst % 2 == 0) ? kInf : 1.0;
        size_t n = 2 + rng.next() % 7;
        Vec w0(n), w1(n), x(n);
        for (size_t i = 0; i < n; ++i) {
            w0[i] = std::exp(rng.range(-2, 2));
            w1[i] = std::exp(rng.range(-2, 2));
            x[i] = rng.range(0.3, 2.0) * (rng.next() % 2 ? 1.0 : -1.0);
        }
        double lambda = 1.6 + rng.unit();
        WeightedCouple c = make_couple(w0, w1, p);
        BlockPartition part = partition(c, lambda);
        IotaResult ir = iota(c, part, x);
        Vec back = pi(c, part, x, ir, ir.s);
        for (size_t i = 0; i < n; ++i) {
            CHECK(std::fabs(back[i] - x[i]) <= 1e-12 * std::fabs(x[i]));
        }
        WeightedCouple bc = block_couple(ir.block_labels, lambda, p);
        for (int side = 0; side < 2; ++side) {
            double num = norm_side(bc, side, ir.s);
            double den = norm_side(c, side, x);
            CHECK(num <= den * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("surrogate K transport through the section") {
    TestRng rng(123);
    for (int inst = 0; inst < 20; ++inst) {
        size_t n = 3 + rng.next() % 5;
        Vec w0(n), w1(n), x(n);
        for (size_t i = 0; i < n; ++i) {
            w0[i] = std::exp(rng.range(-2, 2));
            w1[i] = std::exp(rng.range(-2, 2));
            x[i] = rng.range(0.3, 2.0);
        }
        double lambda = 2.0;
        WeightedCouple c = make_couple(w0, w1, kInf);
        BlockPartition part = partition(c, lambda);
        IotaResult ir = iota(c, part, x);
        WeightedCouple bc = block_couple(ir.block_labels, lambda, kInf);
        for (double t : log_grid(1e-2, 1e2, 9)) {
            double kx = k_surrogate(c, t, x);
            double ks = k_surrogate(bc, t, ir.s);
            CHECK(ks <= lambda * kx * (1.0 + 1e-9));
            CHECK(ks >= kx / lambda * (1.0 - 1e-9));
        }
    }
}
