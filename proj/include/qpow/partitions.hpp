#pragma once

#include <cstddef>
#include <vector>

#include <gmpxx.h>

#include "qpow/errors.hpp"

// Set partitions of finite index sets and the combinatorial constants built
// from them: Mobius coefficients of the partition lattice, Stirling partition
// numbers, Bell and Fubini numbers, and the smoothing constants used by the
// characteristic-function bound.

namespace qpow {

// Hard cap on ground-set size for enumeration; Bell(12) is about 4.2 million,
// the practical ceiling for anything that loops over all partitions.
inline constexpr int max_partition_ground_set = 12;

// A partition of a finite index set into nonempty, pairwise-disjoint blocks.
// Canonical form: elements sorted within each block, blocks sorted by their
// minimum element. Equality is structural.
struct SetPartition {
    std::vector<std::vector<int>> blocks;
    std::vector<int> ground_set;  // sorted, equals the union of the blocks

    std::size_t block_count() const { return blocks.size(); }
    bool operator==(const SetPartition&) const = default;
};

// All partitions of K, each exactly once, in restricted-growth-string order
// (which is canonical and duplicate-free by construction). K must be nonempty,
// contain no duplicates, and have at most max_partition_ground_set elements.
std::vector<SetPartition> enumerate_partitions(const std::vector<int>& K);

// Mobius coefficient of a partition with the given number of blocks:
// (-1)^(blocks-1) * (blocks-1)!
long mobius_coefficient(std::size_t block_count);
long mobius_coefficient(const SetPartition& alpha);

// Number of partitions of a j-element set into k nonempty blocks.
// Negative arguments are rejected; k > j yields 0.
mpz_class stirling_partition(int j, int k);

// Number of partitions of a j-element set.
mpz_class bell_number(int j);

// Ordered Bell number: sum over k of stirling_partition(j, k) * k!
mpz_class fubini(int j);

// c1 = cbrt(32 / (pi * (1 - (3/4)^(1/m)))), strictly increasing in m;
// c2 = 12 / pi.
struct SmoothingConstants {
    double c1;
    double c2;
};
SmoothingConstants smoothing_constants(int m);

// One summand of the partition-lattice operator: a partition of the axis set
// {0..m-1} with blocks stored as bitmasks, together with its Mobius
// coefficient. The per-m lists are computed once and cached since the operator
// is evaluated at many quadrature nodes.
struct LambdaTerm {
    std::vector<unsigned> block_masks;
    long mu;
};
const std::vector<LambdaTerm>& lambda_terms(int m);

}
