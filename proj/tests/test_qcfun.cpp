#include <doctest.h>

#include <cmath>

#include "interpkit/qcfun.hpp"

using namespace interpkit;

TEST_CASE("power law evaluation") {
    CHECK(QcFunction::power_law(0.5)(4.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(QcFunction::power_law(0.0)(7.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(QcFunction::power_law(0.5)(0.0), std::domain_error);
    CHECK_THROWS_AS(QcFunction::power_law(0.5)(-1.0), std::domain_error);
}

TEST_CASE("min affine evaluation") {
    QcFunction f = QcFunction::min_affine({{1.0, 1.0}});
    CHECK(f(0.25) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(f(3.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("conjugate") {
    QcFunction f = QcFunction::power_law(0.5);
    CHECK(f.conjugate(4.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(f.conjugate(9.0) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("dilation of power laws is exact") {
    auto grid = log_grid(1e-3, 1e3, 9);
    CHECK(dilation(QcFunction::power_law(0.5), 9.0, grid) ==
          doctest::Approx(3.0).epsilon(1e-12));
    CHECK(dilation(QcFunction::power_law(1.0), 2.0, grid) ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("dilation of a sampled majorant sits between the grid sup and 2") {
    std::vector<std::pair<double, double>> samples;
    for (double t : log_grid(1e-2, 1e2, 33)) samples.emplace_back(t, std::min(1.0, t));
    QcFunction f = QcFunction::concave_majorant(samples);
    auto grid = log_grid(1e-2, 1e2, 64);
    double v = dilation(f, 2.0, grid);
    CHECK(v >= 1.0 - 1e-9);
    CHECK(v <= 2.0 + 1e-9);
    // refinement sup can only grow
    double fine = dilation(f, 2.0, log_grid(1e-2, 1e2, 4096));
    CHECK(v <= fine + 1e-9);
}

TEST_CASE("derived weight") {
    SUBCASE("square root") {
        auto w = derived_weight(QcFunction::power_law(0.5), {1.0, 1.0}, {1.0, 0.25});
        REQUIRE(w.size() == 2);
        CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("constant function is the identity on w0") {
        auto w = derived_weight(QcFunction::power_law(0.0), {2.0, 5.0, 0.3}, {1.0, 7.0, 9.0});
        CHECK(w[0] == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(w[1] == doctest::Approx(5.0).epsilon(1e-14));
        CHECK(w[2] == doctest::Approx(0.3).epsilon(1e-14));
    }
    SUBCASE("quarter power") {
        auto w = derived_weight(QcFunction::power_law(0.25), {1.0}, {1.0 / 16.0});
        CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(derived_weight(QcFunction::power_law(0.5), {1.0}, {1.0, 2.0}),
                        std::invalid_argument);
    }
}

TEST_CASE("sparse sequence for power laws") {
    SUBCASE("theta one half gives ratio 4") {
        SparseSequence s = sparse_tau(QcFunction::power_law(0.5), -2, 2);
        REQUIRE(s.size() == 5);
        std::vector<double> expect = {1.0 / 16, 0.25, 1.0, 4.0, 16.0};
        for (int i = 0; i < 5; ++i) {
            CHECK(s.tau[i] == doctest::Approx(expect[i]).epsilon(1e-9));
        }
        CHECK(s.at(0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("theta one quarter gives ratio 16") {
        SparseSequence s = sparse_tau(QcFunction::power_law(0.25), 0, 1);
        REQUIRE(s.size() == 2);
        CHECK(s.tau[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.tau[1] == doctest::Approx(16.0).epsilon(1e-9));
    }
    SUBCASE("boundary exponents exhaust the range") {
        CHECK_THROWS_AS(sparse_tau(QcFunction::power_law(0.0), -1, 1),
                        RangeAssumptionViolated);
        CHECK_THROWS_AS(sparse_tau(QcFunction::power_law(1.0), -1, 1),
                        RangeAssumptionViolated);
    }
    SUBCASE("power ratio closed form") {
        for (double theta : {0.2, 0.5, 0.7}) {
            SparseSequence s = sparse_tau(QcFunction::power_law(theta), -3, 3);
            double r = std::pow(2.0, 1.0 / std::min(theta, 1.0 - theta));
            for (int k = s.k_min; k <= s.k_max; ++k) {
                CHECK(s.at(k) ==
                      doctest::Approx(std::pow(r, static_cast<double>(k))).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("sparse sequence pair inequality across the catalog") {
    std::vector<QcFunction> cat = {QcFunction::power_law(0.3),
                                   QcFunction::power_log(0.5, 1.0),
                                   QcFunction::power_log(0.35, -0.5)};
    for (const auto& rho : cat) {
        SparseSequence s = sparse_tau(rho, -4, 4);
        for (int j = s.k_min; j <= s.k_max; ++j) {
            for (int k = s.k_min; k <= s.k_max; ++k) {
                double lhs = std::min(1.0, s.at(j) / s.at(k)) * rho(s.at(k)) / rho(s.at(j));
                CHECK(lhs <= std::pow(2.0, -std::abs(j - k)) + 1e-12);
            }
        }
    }
}

TEST_CASE("sparse sequence majorant reconstruction with constant 2") {
    QcFunction rho = QcFunction::power_law(0.4);
    SparseSequence s = sparse_tau(rho, -5, 5);
    for (double t : log_grid(s.tau.front(), s.tau.back(), 100)) {
        double sup = 0.0;
        for (double tk : s.tau) sup = std::max(sup, std::min(1.0, t / tk) * rho(tk));
        CHECK(rho(t) <= 2.0 * sup + 1e-12);
    }
}

TEST_CASE("dilation submultiplicative on grid-closed products") {
    QcFunction rho = QcFunction::power_log(0.5, 1.0);
    auto grid = log_grid(1e-4, 1e4, 65);
    double s2 = dilation(rho, 2.0, grid);
    double s4 = dilation(rho, 4.0, grid);
    CHECK(s4 <= s2 * s2 + 1e-9);
}

TEST_CASE("quasi-concavity holds across the catalog") {
    auto grid = log_grid(1e-3, 1e3, 101);
    CHECK(quasi_concavity_violation(QcFunction::power_law(0.5), grid) == 0.0);
    // the log factor keeps quasi-concavity only while beta <= min(theta, 1-theta);
    // beyond that the checker must flag a witness point
    CHECK(quasi_concavity_violation(QcFunction::power_log(0.5, 0.4), grid) == 0.0);
    CHECK(quasi_concavity_violation(QcFunction::power_log(0.3, 2.0), grid) > 0.0);
    CHECK(quasi_concavity_violation(QcFunction::min_affine({{1.0, 2.0}, {3.0, 0.5}}),
                                    grid) == 0.0);
    std::vector<std::pair<double, double>> samples = {{0.5, 0.6}, {1.0, 1.0}, {4.0, 1.5}};
    CHECK(quasi_concavity_violation(QcFunction::concave_majorant(samples), grid) == 0.0);
}

TEST_CASE("concave majorant interpolates above its samples") {
    std::vector<std::pair<double, double>> samples = {{1.0, 1.0}, {2.0, 1.2}, {8.0, 2.0}};
    QcFunction f = QcFunction::concave_majorant(samples);
    for (const auto& [t, y] : samples) CHECK(f(t) >= y - 1e-12);
}

TEST_CASE("power class membership") {
    CHECK(is_power_class_two_sided(QcFunction::power_law(0.5)));
    CHECK_FALSE(is_power_class_two_sided(QcFunction::power_law(0.0)));
    CHECK_FALSE(is_power_class_two_sided(QcFunction::power_law(1.0)));
}

TEST_CASE("truncate option clips instead of throwing when one side exhausts") {
    // min_affine saturates at c, so the forward recursion must stop
    QcFunction rho = QcFunction::min_affine({{4.0, 1.0}});
    SparseSequence s = sparse_tau(rho, -1, 6, true);
    CHECK(s.truncated_high);
    CHECK(s.k_max < 6);
}
