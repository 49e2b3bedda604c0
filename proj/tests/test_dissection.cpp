#include <doctest.h>

#include <vector>

#include <gmpxx.h>

#include "qpow/dissection.hpp"
#include "test_support.hpp"

using qpow::DissectionSpec;

TEST_CASE("spec json parsing and validation") {
    const DissectionSpec spec = qpow::dissection_spec_from_json("{\"classes\": [[3], [4, 5]]}");
    REQUIRE(spec.classes.size() == 2);
    CHECK(spec.classes[1] == std::vector<int>{4, 5});

    CHECK_THROWS_AS(qpow::dissection_spec_from_json("{}"), std::invalid_argument);
    CHECK_THROWS_AS(qpow::dissection_spec_from_json("{\"classes\": []}"), std::invalid_argument);
    CHECK_THROWS_AS(qpow::dissection_spec_from_json("{\"classes\": [[2]]}"),
                    std::invalid_argument);  // faces need at least 3 sides
    CHECK_THROWS_AS(qpow::dissection_spec_from_json("{\"classes\": [[3], [3]]}"),
                    std::invalid_argument);  // classes must be disjoint
    CHECK_THROWS_AS(qpow::dissection_spec_from_json("nope"), std::invalid_argument);
}

TEST_CASE("triangulation counts are the catalan numbers") {
    // oracle sanity first
    CHECK(testsupport::catalan_number(0) == 1);
    CHECK(testsupport::catalan_number(3) == 5);
    CHECK(testsupport::catalan_number(13) == 742900);

    const DissectionSpec spec{{{3}}};
    const auto solved = qpow::solve_dissection_series(spec, 14);
    for (int n = 2; n <= 15; ++n) {
        const auto counts = qpow::dissection_counts(solved, n);
        REQUIRE(counts.size() == 1);
        const auto& [r, c] = *counts.begin();
        CHECK(r == std::vector<int>{n - 2});
        CHECK(c == testsupport::catalan_number(n - 2));
    }
}

TEST_CASE("pentagon and hexagon tables for triangle-or-quadrilateral faces") {
    const DissectionSpec spec{{{3}, {4}}};

    const auto penta = qpow::dissection_counts(spec, 5);
    REQUIRE(penta.size() == 2);
    CHECK(penta.at({3, 0}) == 5);
    CHECK(penta.at({1, 1}) == 5);

    const auto hexa = qpow::dissection_counts(spec, 6);
    REQUIRE(hexa.size() == 3);
    CHECK(hexa.at({4, 0}) == 14);
    CHECK(hexa.at({2, 1}) == 21);
    CHECK(hexa.at({0, 2}) == 3);
}

TEST_CASE("counts match the brute-force chord enumeration") {
    const DissectionSpec spec{{{3}, {4}}};
    for (int n = 3; n <= 8; ++n) {
        const auto brute = testsupport::brute_force_dissections(spec, n);
        const auto counts = qpow::dissection_counts(spec, n);
        REQUIRE(counts.size() == brute.size());
        for (const auto& [r, c] : brute) {
            auto it = counts.find(r);
            REQUIRE(it != counts.end());
            CHECK(it->second == c);
        }
    }
    // a second face-size mix, including a class with two sizes
    const DissectionSpec mixed{{{3, 5}, {4}}};
    for (int n = 4; n <= 8; ++n) {
        const auto brute = testsupport::brute_force_dissections(mixed, n);
        const auto counts = qpow::dissection_counts(mixed, n);
        REQUIRE(counts.size() == brute.size());
        for (const auto& [r, c] : brute) CHECK(counts.at(r) == c);
    }
}

TEST_CASE("face counts satisfy the euler edge balance") {
    // every face of size k uses k-2 units of n-2
    const DissectionSpec spec{{{3}, {4}}};
    for (int n = 4; n <= 10; ++n)
        for (const auto& [r, c] : qpow::dissection_counts(spec, n)) {
            CHECK(c > 0);
            CHECK(r[0] + 2 * r[1] == n - 2);
        }
}

TEST_CASE("totals for triangle-or-quadrilateral dissections") {
    const DissectionSpec spec{{{3}, {4}}};
    const long totals[] = {1, 1, 3, 10, 38, 154, 654};
    for (int n = 2; n <= 8; ++n) {
        mpz_class sum = 0;
        for (const auto& [r, c] : qpow::dissection_counts(spec, n)) sum += c;
        CHECK(sum == totals[n - 2]);
    }
}

TEST_CASE("queries validate the polygon size and the solved order") {
    const DissectionSpec spec{{{3}}};
    CHECK_THROWS_AS(qpow::dissection_counts(spec, 1), std::invalid_argument);
    const auto solved = qpow::solve_dissection_series(spec, 5);
    CHECK_THROWS_AS(qpow::dissection_counts(solved, 8), std::invalid_argument);
    const std::string msg = [&] {
        try {
            qpow::dissection_counts(solved, 8);
        } catch (const std::exception& e) {
            return std::string(e.what());
        }
        return std::string();
    }();
    CHECK(msg.find("re-solve") != std::string::npos);
    CHECK_THROWS_AS(qpow::solve_dissection_series(spec, 0), std::invalid_argument);
    CHECK_THROWS_AS(qpow::solve_dissection_series(DissectionSpec{}, 4), std::invalid_argument);
}

TEST_CASE("distribution over dissections") {
    const DissectionSpec spec{{{3}, {4}}};
    const auto d = qpow::dissection_distribution(spec, 5);
    CHECK(d.dim() == 2);
    CHECK(d.total() == 10);
    // a square admits no dissection into five-sided faces
    const DissectionSpec penta_only{{{5}}};
    CHECK_THROWS_AS(qpow::dissection_distribution(penta_only, 4), std::domain_error);
}

TEST_CASE("family re-solves lazily for growing polygon sizes") {
    const DissectionSpec spec{{{3}, {4}}};
    const auto fam = qpow::dissection_family(spec);
    CHECK(fam.dim == 2);
    CHECK(fam.phi(10) == 10.0);
    const auto d6 = fam.generator(6);
    CHECK(d6.total() == 38);
    const auto d10 = fam.generator(10);  // forces a re-solve at higher order
    const auto direct = qpow::dissection_distribution(spec, 10);
    REQUIRE(d10.size() == direct.size());
    for (std::size_t i = 0; i < d10.size(); ++i) {
        CHECK(d10.point(i) == direct.point(i));
        CHECK(d10.weight(i) == direct.weight(i));
    }
    const auto d6_again = fam.generator(6);  // cached series still answers small n
    CHECK(d6_again.total() == 38);
}
