#include "qpow/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace qpow {

namespace {

// Visit every restricted growth string of length n: a[0] = 0 and
// a[i] <= 1 + max(a[0..i-1]). Lexicographic order, so the induced partition
// order is canonical. fn receives the string and its number of blocks.
template <class Fn>
void visit_rgs(std::vector<int>& a, int i, int next_label, Fn&& fn) {
    if (i == static_cast<int>(a.size())) {
        fn(a, next_label);
        return;
    }
    for (int v = 0; v <= next_label; ++v) {
        a[i] = v;
        visit_rgs(a, i + 1, std::max(next_label, v + 1), fn);
    }
}

void check_ground_set(const std::vector<int>& K) {
    if (K.empty()) throw std::invalid_argument("enumerate_partitions: empty index set");
    if (static_cast<int>(K.size()) > max_partition_ground_set)
        throw capacity_error("enumerate_partitions: index set larger than " +
                             std::to_string(max_partition_ground_set) + " elements");
    for (std::size_t i = 0; i < K.size(); ++i)
        for (std::size_t j = i + 1; j < K.size(); ++j)
            if (K[i] == K[j]) throw std::invalid_argument("enumerate_partitions: duplicate index");
}

}  // namespace

std::vector<SetPartition> enumerate_partitions(const std::vector<int>& K) {
    check_ground_set(K);
    std::vector<int> sorted = K;
    std::sort(sorted.begin(), sorted.end());

    const int n = static_cast<int>(sorted.size());
    std::vector<SetPartition> out;
    std::vector<int> rgs(n, 0);
    visit_rgs(rgs, 0, 0, [&](const std::vector<int>& a, int num_blocks) {
        SetPartition p;
        p.ground_set = sorted;
        p.blocks.assign(num_blocks, {});
        for (int i = 0; i < n; ++i) p.blocks[a[i]].push_back(sorted[i]);
        out.push_back(std::move(p));
    });
    return out;
}

long mobius_coefficient(std::size_t block_count) {
    if (block_count == 0) throw std::invalid_argument("mobius_coefficient: partition has no blocks");
    long value = 1;
    for (std::size_t i = 1; i + 1 <= block_count; ++i) value *= -static_cast<long>(i);
    return value;
}

long mobius_coefficient(const SetPartition& alpha) {
    return mobius_coefficient(alpha.block_count());
}

mpz_class stirling_partition(int j, int k) {
    if (j < 0 || k < 0) throw std::invalid_argument("stirling_partition: negative argument");
    if (k > j) return 0;
    if (j == 0) return 1;  // k == 0 here
    if (k == 0) return 0;
    // S(j,k) = k*S(j-1,k) + S(j-1,k-1), rolling row
    std::vector<mpz_class> row(static_cast<std::size_t>(k) + 1, 0);
    row[0] = 1;  // S(0,0)
    for (int n = 1; n <= j; ++n) {
        for (int b = std::min(n, k); b >= 1; --b) row[b] = b * row[b] + row[b - 1];
        row[0] = 0;
    }
    return row[k];
}

mpz_class bell_number(int j) {
    if (j < 0) throw std::invalid_argument("bell_number: negative argument");
    // Bell triangle
    std::vector<mpz_class> row{1};
    for (int n = 0; n < j; ++n) {
        std::vector<mpz_class> next;
        next.reserve(row.size() + 1);
        next.push_back(row.back());
        for (const mpz_class& v : row) next.push_back(next.back() + v);
        row = std::move(next);
    }
    return row.front();
}

mpz_class fubini(int j) {
    if (j < 0) throw std::invalid_argument("fubini: negative argument");
    mpz_class sum = j == 0 ? 1 : 0;
    mpz_class kfact = 1;
    for (int k = 1; k <= j; ++k) {
        kfact *= k;
        sum += stirling_partition(j, k) * kfact;
    }
    return sum;
}

SmoothingConstants smoothing_constants(int m) {
    if (m < 1) throw std::invalid_argument("smoothing_constants: dimension must be positive");
    const double pi = std::numbers::pi;
    const double c1 = std::cbrt(32.0 / (pi * (1.0 - std::pow(0.75, 1.0 / m))));
    return SmoothingConstants{c1, 12.0 / pi};
}

const std::vector<LambdaTerm>& lambda_terms(int m) {
    if (m < 1) throw std::invalid_argument("lambda_terms: dimension must be positive");
    if (m > max_partition_ground_set)
        throw capacity_error("lambda_terms: dimension larger than " +
                             std::to_string(max_partition_ground_set));

    static std::mutex mtx;
    static std::vector<std::vector<LambdaTerm>> cache(max_partition_ground_set + 1);
    std::lock_guard<std::mutex> lock(mtx);
    std::vector<LambdaTerm>& slot = cache[m];
    if (slot.empty()) {
        std::vector<int> rgs(m, 0);
        visit_rgs(rgs, 0, 0, [&](const std::vector<int>& a, int num_blocks) {
            LambdaTerm term;
            term.block_masks.assign(num_blocks, 0u);
            for (int i = 0; i < m; ++i) term.block_masks[a[i]] |= 1u << i;
            term.mu = mobius_coefficient(static_cast<std::size_t>(num_blocks));
            slot.push_back(std::move(term));
        });
    }
    return slot;
}

}
