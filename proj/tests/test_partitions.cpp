#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "qpow/partitions.hpp"

using qpow::SetPartition;

TEST_CASE("enumerate_partitions counts match Bell numbers") {
    const long bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140};
    for (int m = 1; m <= 8; ++m) {
        std::vector<int> ground;
        for (int i = 1; i <= m; ++i) ground.push_back(i);
        const auto parts = qpow::enumerate_partitions(ground);
        CHECK(parts.size() == static_cast<std::size_t>(bell[m]));
    }
}

TEST_CASE("enumerate_partitions yields canonical, distinct partitions") {
    const std::vector<int> ground{2, 5, 7, 9};
    const auto parts = qpow::enumerate_partitions(ground);
    std::set<std::vector<std::vector<int>>> seen;
    for (const SetPartition& p : parts) {
        CHECK(p.ground_set == ground);
        int covered = 0;
        for (const auto& block : p.blocks) {
            CHECK(!block.empty());
            CHECK(std::is_sorted(block.begin(), block.end()));
            covered += static_cast<int>(block.size());
        }
        for (std::size_t i = 1; i < p.blocks.size(); ++i)
            CHECK(p.blocks[i - 1].front() < p.blocks[i].front());
        CHECK(covered == 4);
        CHECK(seen.insert(p.blocks).second);
    }
    CHECK(parts.size() == 15);
}

TEST_CASE("enumerate_partitions on three elements, restricted growth order") {
    const auto parts = qpow::enumerate_partitions({1, 2, 3});
    REQUIRE(parts.size() == 5);
    CHECK(parts[0].blocks == std::vector<std::vector<int>>{{1, 2, 3}});
    CHECK(parts[1].blocks == std::vector<std::vector<int>>{{1, 2}, {3}});
    CHECK(parts[2].blocks == std::vector<std::vector<int>>{{1, 3}, {2}});
    CHECK(parts[3].blocks == std::vector<std::vector<int>>{{1}, {2, 3}});
    CHECK(parts[4].blocks == std::vector<std::vector<int>>{{1}, {2}, {3}});
    const long mu[] = {1, -1, -1, -1, 2};
    for (int i = 0; i < 5; ++i) CHECK(qpow::mobius_coefficient(parts[i]) == mu[i]);
}

TEST_CASE("enumerate_partitions rejects oversized and invalid ground sets") {
    std::vector<int> big;
    for (int i = 0; i < 13; ++i) big.push_back(i);
    CHECK_THROWS_AS(qpow::enumerate_partitions(big), qpow::capacity_error);
    CHECK_THROWS_AS(qpow::enumerate_partitions({}), std::invalid_argument);
    CHECK_THROWS_AS(qpow::enumerate_partitions({1, 1}), std::invalid_argument);
}

TEST_CASE("mobius coefficients alternate with factorial growth") {
    CHECK(qpow::mobius_coefficient(std::size_t{1}) == 1);
    CHECK(qpow::mobius_coefficient(std::size_t{2}) == -1);
    CHECK(qpow::mobius_coefficient(std::size_t{3}) == 2);
    CHECK(qpow::mobius_coefficient(std::size_t{4}) == -6);
    CHECK(qpow::mobius_coefficient(std::size_t{5}) == 24);
}

TEST_CASE("mobius coefficients sum to zero over the lattice") {
    for (int m = 2; m <= 6; ++m) {
        std::vector<int> ground;
        for (int i = 1; i <= m; ++i) ground.push_back(i);
        long sum = 0;
        for (const SetPartition& p : qpow::enumerate_partitions(ground))
            sum += qpow::mobius_coefficient(p);
        CHECK(sum == 0);
    }
}

TEST_CASE("stirling partition numbers") {
    CHECK(qpow::stirling_partition(0, 0) == 1);
    CHECK(qpow::stirling_partition(4, 2) == 7);
    CHECK(qpow::stirling_partition(5, 3) == 25);
    CHECK(qpow::stirling_partition(3, 5) == 0);
    CHECK(qpow::stirling_partition(6, 1) == 1);
    CHECK_THROWS_AS(qpow::stirling_partition(-1, 0), std::invalid_argument);
}

TEST_CASE("bell and fubini numbers") {
    CHECK(qpow::bell_number(0) == 1);
    CHECK(qpow::bell_number(6) == 203);
    CHECK(qpow::bell_number(12) == mpz_class("4213597"));
    CHECK(qpow::fubini(0) == 1);
    CHECK(qpow::fubini(1) == 1);
    CHECK(qpow::fubini(2) == 3);
    CHECK(qpow::fubini(3) == 13);
    CHECK(qpow::fubini(4) == 75);
    CHECK(qpow::fubini(5) == 541);
}

TEST_CASE("smoothing constants") {
    // cbrt(128/pi), frozen from a 30-digit computation
    const auto one = qpow::smoothing_constants(1);
    CHECK(one.c1 == doctest::Approx(3.4410160553123985).epsilon(1e-14));
    CHECK(one.c2 == doctest::Approx(12.0 / std::numbers::pi).epsilon(1e-15));
    // closed form at m = 2
    const double c1_2 = std::cbrt(32.0 / (std::numbers::pi * (1.0 - std::pow(0.75, 0.5))));
    CHECK(qpow::smoothing_constants(2).c1 == doctest::Approx(c1_2).epsilon(1e-14));
    double prev = one.c1;
    for (int m = 2; m <= 6; ++m) {
        const double cur = qpow::smoothing_constants(m).c1;
        CHECK(cur > prev);
        prev = cur;
    }
    CHECK_THROWS_AS(qpow::smoothing_constants(0), std::invalid_argument);
}

TEST_CASE("lambda_terms covers the lattice with block masks") {
    for (int m = 2; m <= 5; ++m) {
        const auto& terms = qpow::lambda_terms(m);
        CHECK(terms.size() == qpow::bell_number(m).get_ui());
        const unsigned full = (1u << m) - 1u;
        for (const qpow::LambdaTerm& t : terms) {
            unsigned seen = 0;
            for (unsigned b : t.block_masks) {
                CHECK(b != 0u);
                CHECK((seen & b) == 0u);
                seen |= b;
            }
            CHECK(seen == full);
            CHECK(t.mu == qpow::mobius_coefficient(t.block_masks.size()));
        }
        // caching returns the same object
        CHECK(&qpow::lambda_terms(m) == &terms);
    }
}
