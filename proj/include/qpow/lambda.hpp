#pragma once

#include <stdexcept>
#include <type_traits>
#include <vector>

#include "qpow/partitions.hpp"
#include "qpow/scalar.hpp"

// The partition-lattice operator
//
//   Lambda(h)(t) = sum over partitions alpha of the axis set of
//                  mu_alpha * prod over blocks J of h(t restricted to J)
//
// where "restricted to J" zeroes every coordinate outside J. For one axis it
// is the identity; for two axes it is h(t1,t2) - h(t1,0)h(0,t2). When
// h(0) = 1 the result vanishes on every coordinate hyperplane, which makes
// Lambda(h)(t) / (t1...tm) integrable near the origin.
//
// h is any deterministic callable on vectors of Scalar; its value type may
// differ from Scalar (characteristic functions map real points to complex
// values). Scalar and the value type can be double, complex<double>, or
// mpq_class.

namespace qpow {

// Zero every coordinate of t whose index is not listed in J.
template <class Scalar>
std::vector<Scalar> project(const std::vector<Scalar>& t, const std::vector<int>& J) {
    std::vector<Scalar> out(t.size(), Scalar(0));
    for (int j : J) {
        if (j < 0 || j >= static_cast<int>(t.size()))
            throw std::invalid_argument("project: index outside the ground set");
        out[j] = t[j];
    }
    return out;
}

// Place the coordinates of t_J (indexed by J, in order) into a vector of
// size k_size, zeros elsewhere. Inverse of project up to the J positions.
template <class Scalar>
std::vector<Scalar> embed(const std::vector<Scalar>& t_J, const std::vector<int>& J, int k_size) {
    if (t_J.size() != J.size()) throw std::invalid_argument("embed: index/value length mismatch");
    std::vector<Scalar> out(static_cast<std::size_t>(k_size), Scalar(0));
    for (std::size_t i = 0; i < J.size(); ++i) {
        if (J[i] < 0 || J[i] >= k_size)
            throw std::invalid_argument("embed: index outside the ground set");
        out[J[i]] = t_J[i];
    }
    return out;
}

template <class Scalar, class H>
auto lambda_eval(H&& h, const std::vector<Scalar>& t) {
    using Value = std::invoke_result_t<H&, const std::vector<Scalar>&>;
    const int m = static_cast<int>(t.size());
    if (m < 1) throw std::invalid_argument("lambda_eval: empty argument vector");
    if (m > max_partition_ground_set)
        throw capacity_error("lambda_eval: more than 12 axes");
    if (m == 1) return Value(h(t));

    // h depends on its argument only through the subset of surviving
    // coordinates, so evaluate once per subset and reuse across partitions.
    const unsigned full = (1u << m) - 1u;
    std::vector<Value> subset_value(full + 1, Value(0));
    std::vector<Scalar> masked(t.size(), Scalar(0));
    for (unsigned mask = 1; mask <= full; ++mask) {
        for (int j = 0; j < m; ++j) masked[j] = (mask >> j & 1u) ? t[j] : Scalar(0);
        subset_value[mask] = h(masked);
    }

    Value acc(0);
    for (const LambdaTerm& term : lambda_terms(m)) {
        Value prod(term.mu);
        for (unsigned block : term.block_masks) prod *= subset_value[block];
        acc += prod;
    }
    return acc;
}

// lambda_eval(h, t) / (t_1 ... t_m). Only defined off the coordinate
// hyperplanes; callers keep their evaluation points away from them
// (Gauss-type nodes never have a zero coordinate).
template <class Scalar, class H>
auto lambda_quotient(H&& h, const std::vector<Scalar>& t, double floor = 1e-12) {
    for (const Scalar& tk : t)
        if (magnitude(tk) < floor)
            throw std::domain_error("lambda_quotient: evaluation point too close to a coordinate hyperplane");
    auto value = lambda_eval(h, t);
    for (const Scalar& tk : t) value /= tk;
    return value;
}

}
