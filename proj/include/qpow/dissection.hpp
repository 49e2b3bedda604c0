#pragma once

#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "qpow/quasi_power.hpp"
#include "qpow/series.hpp"

namespace qpow {

// Allowed inner-face sizes of polygon dissections, grouped into disjoint
// classes. Class i's face count is coordinate i of the count vector r.
// Sizes not listed in any class are forbidden.
struct DissectionSpec {
    std::vector<std::vector<int>> classes;
};

// {"classes": [[3],[4]]}
DissectionSpec dissection_spec_from_json(const std::string& text);

// Solves f = z + sum_i x_i sum_{k in S_i} f^(k-1) by fixed-point iteration,
// truncated to z-order z_order. Variable 0 is z, variable i is x_i.
// Sizes k with k-1 > z_order cannot contribute at this order and are skipped.
MultiSeries<mpq_class> solve_dissection_series(const DissectionSpec& spec, int z_order);

// face-count vector r -> number a_n(r) of dissections of the labelled n-gon
using DissectionCounts = std::map<std::vector<int>, mpz_class>;

// Exact coefficients [x^r z^(n-1)] of the solved series; n >= 2.
DissectionCounts dissection_counts(const DissectionSpec& spec, int n);

// Same, reading a previously solved series; asks for a re-solve when the
// series' z-order is below n-1.
DissectionCounts dissection_counts(const MultiSeries<mpq_class>& solved, int n);

// Uniform distribution over dissections of the n-gon, atoms keyed by r.
LatticeDistribution dissection_distribution(const DissectionSpec& spec, int n);

// Quasi-power family indexed by n (phi_n = n); the solved series is cached
// and re-solved only when a larger n arrives. No closed-form cumulant data.
QuasiPowerFamily dissection_family(const DissectionSpec& spec);

}  // namespace qpow
