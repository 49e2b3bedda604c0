#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <gmpxx.h>

#include "qpow/distribution.hpp"
#include "test_support.hpp"

using qpow::GaussianSpec;
using qpow::LatticeDistribution;
using qpow::make_lattice_int;

namespace {

LatticeDistribution binomial_lattice(int n) {
    std::vector<std::pair<std::vector<long>, mpz_class>> atoms;
    for (int k = 0; k <= n; ++k) {
        mpz_class w;
        mpz_bin_uiui(w.get_mpz_t(), n, k);
        atoms.push_back({{k}, w});
    }
    return make_lattice_int(1, std::move(atoms));
}

}  // namespace

TEST_CASE("constructor sorts, merges and validates atoms") {
    const LatticeDistribution d(1, {{{mpq_class(2)}, 1}, {{mpq_class(0)}, 2}, {{mpq_class(2)}, 3}});
    REQUIRE(d.size() == 2);
    CHECK(d.point(0)[0] == 0);
    CHECK(d.point(1)[0] == 2);
    CHECK(d.weight(1) == 4);
    CHECK(d.total() == 6);
    CHECK(d.probability_d(0) == doctest::Approx(2.0 / 6.0).epsilon(1e-15));

    CHECK_THROWS_AS(LatticeDistribution(0, {}), std::invalid_argument);
    CHECK_THROWS_AS(LatticeDistribution(1, {}), std::invalid_argument);
    CHECK_THROWS_AS(LatticeDistribution(1, {{{mpq_class(1), mpq_class(2)}, 1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(LatticeDistribution(1, {{{mpq_class(1)}, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(LatticeDistribution(1, {{{mpq_class(1)}, -2}}), std::invalid_argument);
}

TEST_CASE("product of independent blocks") {
    const auto coin = make_lattice_int(1, {{{-1}, 1}, {{1}, 1}});
    const auto asym = make_lattice_int(1, {{{-1}, 1}, {{1}, 2}});
    const auto prod = qpow::product_distribution(coin, asym);
    REQUIRE(prod.dim() == 2);
    REQUIRE(prod.size() == 4);
    CHECK(prod.total() == 6);
    // independence: E(X^a Y^b) factors
    CHECK(qpow::moments(prod, {1, 1}) == 0);
    CHECK(qpow::moments(prod, {2, 1}) == mpq_class(1, 3));
    CHECK(qpow::moments(prod, {1, 0}) == 0);
    CHECK(qpow::moments(prod, {0, 1}) == mpq_class(1, 3));
}

TEST_CASE("cdf is an exact rational right-continuous step function") {
    const auto d = make_lattice_int(1, {{{0}, 1}, {{1}, 1}});
    CHECK(qpow::cdf(d, std::vector<mpq_class>{mpq_class(-1)}) == 0);
    CHECK(qpow::cdf(d, std::vector<mpq_class>{mpq_class(0)}) == mpq_class(1, 2));
    CHECK(qpow::cdf(d, std::vector<mpq_class>{mpq_class(1, 2)}) == mpq_class(1, 2));
    CHECK(qpow::cdf(d, std::vector<mpq_class>{mpq_class(1)}) == 1);
    CHECK(qpow::cdf(d, std::vector<double>{0.5}) == mpq_class(1, 2));
    CHECK_THROWS_AS(qpow::cdf(d, std::vector<double>{std::numeric_limits<double>::quiet_NaN()}),
                    std::invalid_argument);
    CHECK_THROWS_AS(qpow::cdf(d, std::vector<mpq_class>{mpq_class(0), mpq_class(0)}),
                    std::invalid_argument);
}

TEST_CASE("characteristic function of the symmetric coin is cos") {
    const auto coin = make_lattice_int(1, {{{-1}, 1}, {{1}, 1}});
    for (double t : {0.0, 0.3, -1.7, 4.0}) {
        const std::complex<double> v = qpow::char_fn(coin, {t});
        CHECK(v.real() == doctest::Approx(std::cos(t)).epsilon(1e-15));
        CHECK(std::fabs(v.imag()) <= 1e-16);
    }
}

TEST_CASE("moments of a small binomial") {
    const auto b3 = binomial_lattice(3);
    CHECK(qpow::moments(b3, {0}) == 1);
    CHECK(qpow::moments(b3, {1}) == mpq_class(3, 2));
    CHECK(qpow::moments(b3, {2}) == 3);  // E X^2 = npq + (np)^2 = 3/4 + 9/4
    CHECK_THROWS_AS(qpow::moments(b3, {-1}), std::invalid_argument);
    CHECK_THROWS_AS(qpow::moments(b3, {0, 0}), std::invalid_argument);
}

TEST_CASE("standardize centers exactly even with an irrational-looking scale") {
    const auto b4 = binomial_lattice(4);
    const mpq_class mean = qpow::moments(b4, {1});
    const auto z = qpow::standardize(b4, {mean}, std::sqrt(2.0));
    CHECK(qpow::moments(z, {1}) == 0);
    CHECK(z.size() == b4.size());
    CHECK_THROWS_AS(qpow::standardize(b4, {mean, mean}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(qpow::standardize(b4, {mean}, 0.0), std::invalid_argument);
}

TEST_CASE("marginal aggregates collapsed atoms") {
    const auto d = make_lattice_int(
        2, {{{0, 0}, 1}, {{0, 1}, 2}, {{1, 0}, 3}, {{1, 1}, 4}});
    const auto m0 = qpow::marginal(d, {0});
    REQUIRE(m0.size() == 2);
    CHECK(m0.weight(0) == 3);
    CHECK(m0.weight(1) == 7);
    const auto m01 = qpow::marginal(d, {0, 1});
    CHECK(m01.size() == 4);
    CHECK_THROWS_AS(qpow::marginal(d, {1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(qpow::marginal(d, {}), std::invalid_argument);
    CHECK_THROWS_AS(qpow::marginal(d, {2}), std::invalid_argument);
}

TEST_CASE("json round trip preserves points and weights") {
    const LatticeDistribution d(
        2, {{{mpq_class(1, 2), mpq_class(-3)}, 5}, {{mpq_class(0), mpq_class(1, 4)}, 7}});
    const auto back = qpow::lattice_from_json(qpow::to_json(d));
    REQUIRE(back.size() == d.size());
    REQUIRE(back.dim() == d.dim());
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(back.weight(i) == d.weight(i));
        for (int a = 0; a < d.dim(); ++a)
            CHECK(back.point_d(i)[a] == doctest::Approx(d.point_d(i)[a]).epsilon(1e-15));
    }
    CHECK_THROWS_AS(qpow::lattice_from_json("{\"dim\": 1}"), std::invalid_argument);
    CHECK_THROWS_AS(qpow::lattice_from_json("not json"), std::invalid_argument);
}

TEST_CASE("gaussian characteristic function") {
    const GaussianSpec g{2, {0.5, -1.0}, {{2.0, 0.3}, {0.3, 1.0}}};
    const std::vector<double> t{0.7, -0.2};
    const double dot = 0.5 * 0.7 + (-1.0) * (-0.2);
    double q = 0.0;
    const double tv[2] = {0.7, -0.2};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) q += tv[i] * g.cov[i][j] * tv[j];
    const std::complex<double> want = std::exp(-0.5 * q) * std::complex<double>(std::cos(dot), std::sin(dot));
    const std::complex<double> got = qpow::gaussian_char_fn(g, t);
    CHECK(std::abs(got - want) <= 1e-15);
}

TEST_CASE("gaussian cdf in one dimension matches the error-function form") {
    const GaussianSpec g{1, {0.3}, {{1.7 * 1.7}}};
    for (int i = 0; i < 20; ++i) {
        const double z = -4.0 + 8.0 * i / 19.0;
        const double want = testsupport::normal_cdf_closed_form(z, 0.3, 1.7);
        CHECK(qpow::gaussian_cdf(g, {z}, 1e-10) == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("bivariate gaussian cdf at the origin with correlation one half") {
    const GaussianSpec g{2, {}, {{1.0, 0.5}, {0.5, 1.0}}};
    const double got = qpow::gaussian_cdf(g, {0.0, 0.0}, 1e-7);
    CHECK(got == doctest::Approx(1.0 / 3.0).epsilon(3e-7));
}

TEST_CASE("trivariate gaussian cdf oracle values") {
    const GaussianSpec id3{3, {}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    CHECK(qpow::gaussian_cdf(id3, {0.0, 0.0, 0.0}, 1e-6) == doctest::Approx(0.125).epsilon(3e-6));
    const GaussianSpec ex3{3, {}, {{1.0, 0.5, 0.5}, {0.5, 1.0, 0.5}, {0.5, 0.5, 1.0}}};
    CHECK(qpow::gaussian_cdf(ex3, {0.0, 0.0, 0.0}, 1e-6) == doctest::Approx(0.25).epsilon(3e-6));
}

TEST_CASE("gaussian queries validate dimension, tolerance and degeneracy") {
    const GaussianSpec g{2, {}, {{1.0, 0.0}, {0.0, 1.0}}};
    CHECK_THROWS_AS(qpow::gaussian_cdf(g, {0.0}, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(qpow::gaussian_cdf(g, {0.0, 0.0}, 0.0), std::invalid_argument);
    const GaussianSpec deg{2, {}, {{1.0, 1.0}, {1.0, 1.0}}};
    CHECK(!deg.non_degenerate());
    CHECK_THROWS_AS(qpow::gaussian_cdf(deg, {0.0, 0.0}, 1e-6), std::domain_error);
    GaussianSpec g4;
    g4.dim = 4;
    g4.cov.assign(4, std::vector<double>(4, 0.0));
    for (int i = 0; i < 4; ++i) g4.cov[i][i] = 1.0;
    CHECK_THROWS_AS(qpow::gaussian_cdf(g4, {0, 0, 0, 0}, 1e-6), qpow::capacity_error);
}

TEST_CASE("gaussian marginal extracts mean and covariance blocks") {
    const GaussianSpec g{3, {1.0, 2.0, 3.0}, {{4.0, 1.0, 0.5}, {1.0, 5.0, 0.2}, {0.5, 0.2, 6.0}}};
    const GaussianSpec m = qpow::gaussian_marginal(g, {0, 2});
    REQUIRE(m.dim == 2);
    CHECK(m.mean == std::vector<double>{1.0, 3.0});
    CHECK(m.cov[0][1] == 0.5);
    CHECK(m.cov[1][1] == 6.0);
}

TEST_CASE("exact lattice-lattice kolmogorov distance") {
    const auto point = make_lattice_int(1, {{{0}, 1}});
    const auto coin = make_lattice_int(1, {{{-1}, 1}, {{1}, 1}});
    CHECK(qpow::kolmogorov_distance(point, coin) == mpq_class(1, 2));

    const auto diag = make_lattice_int(2, {{{0, 0}, 1}, {{1, 1}, 1}});
    const auto anti = make_lattice_int(2, {{{0, 1}, 1}, {{1, 0}, 1}});
    CHECK(qpow::kolmogorov_distance(diag, anti) == mpq_class(1, 2));
    CHECK(qpow::kolmogorov_distance(diag, diag) == 0);
    CHECK_THROWS_AS(qpow::kolmogorov_distance(point, diag), std::invalid_argument);
}

TEST_CASE("lattice-gaussian kolmogorov distance of the coin against the standard normal") {
    const auto coin = make_lattice_int(1, {{{-1}, 1}, {{1}, 1}});
    const GaussianSpec g{1, {}, {{1.0}}};
    // sup is attained at the atom +1 (or -1 from the left): Phi(1) - 1/2
    const double want = testsupport::normal_cdf_closed_form(1.0, 0.0, 1.0) - 0.5;
    CHECK(qpow::kolmogorov_distance(coin, g, 1e-6) == doctest::Approx(want).epsilon(1e-5));
}

TEST_CASE("lattice-gaussian kolmogorov distance covers joint and marginal corners") {
    const auto d = make_lattice_int(2, {{{-1, 0}, 1}, {{1, 0}, 1}});
    const GaussianSpec g{2, {}, {{1.0, 0.0}, {0.0, 1.0}}};
    const double dist = qpow::kolmogorov_distance(d, g, 1e-6);
    // the sup sits at the corner (1, 0): F_d = 1 against Phi(1) * Phi(0)
    const double phi1 = testsupport::normal_cdf_closed_form(1.0, 0.0, 1.0);
    CHECK(dist == doctest::Approx(1.0 - phi1 * 0.5).epsilon(1e-5));
    // never below the distance of any marginal (here the axis-2 point mass)
    CHECK(dist >= 0.5 - 1e-6);
}
