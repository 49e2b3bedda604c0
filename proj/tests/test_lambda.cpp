#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <gmpxx.h>

#include "qpow/lambda.hpp"
#include "test_support.hpp"

using testsupport::ProductTestFn;
using testsupport::RationalTestFn;

TEST_CASE("project zeroes coordinates outside the index set") {
    const std::vector<double> t{1.0, 2.0, 3.0};
    CHECK(qpow::project(t, {0, 2}) == std::vector<double>{1.0, 0.0, 3.0});
    CHECK(qpow::project(t, {}) == std::vector<double>{0.0, 0.0, 0.0});
    CHECK_THROWS_AS(qpow::project(t, {3}), std::invalid_argument);
}

TEST_CASE("embed places subset coordinates at their indices") {
    CHECK(qpow::embed<double>({5.0, 7.0}, {1, 3}, 4) == std::vector<double>{0.0, 5.0, 0.0, 7.0});
    CHECK_THROWS_AS(qpow::embed<double>({1.0}, {0, 1}, 3), std::invalid_argument);
    CHECK_THROWS_AS(qpow::embed<double>({1.0}, {5}, 3), std::invalid_argument);
}

TEST_CASE("one axis is the identity") {
    auto h = [](const std::vector<double>& t) { return std::cos(t[0]) + 2.0; };
    const std::vector<double> t{0.7};
    CHECK(qpow::lambda_eval(h, t) == h(t));
}

TEST_CASE("two axes equal the explicit two-dimensional difference exactly") {
    std::mt19937 rng(20240601);
    for (int trial = 0; trial < 50; ++trial) {
        const RationalTestFn h(2, rng);
        const auto t = testsupport::random_point_q(2, rng, false);
        const mpq_class lhs = qpow::lambda_eval(h, t);
        const mpq_class rhs =
            h(t) - h(std::vector<mpq_class>{t[0], 0}) * h(std::vector<mpq_class>{0, t[1]});
        CHECK(lhs == rhs);
    }
}

TEST_CASE("vanishes exactly on coordinate hyperplanes in the rational ring") {
    std::mt19937 rng(77);
    for (int m = 2; m <= 4; ++m) {
        for (int trial = 0; trial < 10; ++trial) {
            const RationalTestFn h(m, rng);
            auto t = testsupport::random_point_q(m, rng, true);
            for (int k = 0; k < m; ++k) {
                auto tz = t;
                tz[k] = 0;
                CHECK(qpow::lambda_eval(h, tz) == 0);
            }
        }
    }
}

TEST_CASE("annihilates product-form functions") {
    std::mt19937 rng(12345);
    for (int m = 2; m <= 5; ++m) {
        for (int trial = 0; trial < 10; ++trial) {
            const ProductTestFn h(m, rng);
            const auto tq = testsupport::random_point_q(m, rng, true);
            CHECK(qpow::lambda_eval(h, tq) == 0);
            const auto td = testsupport::to_double(tq);
            CHECK(std::fabs(qpow::lambda_eval(h, td)) <= 1e-12);
        }
    }
}

TEST_CASE("complex-valued test function through a real evaluation point") {
    // characteristic-function-like value type differing from the point type
    auto h = [](const std::vector<double>& t) {
        std::complex<double> acc(1.0, 0.0);
        for (double x : t) acc *= std::complex<double>(std::cos(x), std::sin(x) * 0.5);
        return acc;
    };
    const std::vector<double> t{0.3, -0.4};
    const std::complex<double> direct =
        h(t) - h(std::vector<double>{t[0], 0.0}) * h(std::vector<double>{0.0, t[1]});
    CHECK(std::abs(qpow::lambda_eval(h, t) - direct) <= 1e-15);
}

TEST_CASE("lambda_quotient divides by the coordinate product and guards the hyperplanes") {
    std::mt19937 rng(9);
    const RationalTestFn h(3, rng);
    const std::vector<double> t{0.25, -0.5, 0.5};
    const double quotient = qpow::lambda_quotient(h, t);
    const double direct = qpow::lambda_eval(h, t) / (t[0] * t[1] * t[2]);
    CHECK(quotient == doctest::Approx(direct).epsilon(1e-14));
    CHECK_THROWS_AS(qpow::lambda_quotient(h, std::vector<double>{0.25, 1e-14, 0.5}),
                    std::domain_error);
}

TEST_CASE("rejects empty and oversized argument vectors") {
    auto h = [](const std::vector<double>& t) { return t.empty() ? 1.0 : t[0]; };
    CHECK_THROWS_AS(qpow::lambda_eval(h, std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(qpow::lambda_eval(h, std::vector<double>(13, 0.5)), qpow::capacity_error);
}
