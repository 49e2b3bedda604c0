#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "qpow/scalar.hpp"

// Truncated multivariate power series over a pluggable coefficient ring, and
// univariate polynomials used both standalone and as a coefficient ring.
// Rings in use: mpq_class (exact), double (bulk numerics), Poly<mpq_class>
// (moment polynomials in the scale variable).

namespace qpow {

// ---------------------------------------------------------------------------
// Univariate polynomials, dense, normalized (no trailing zero coefficients;
// the zero polynomial has an empty coefficient vector).

template <class R>
struct Poly {
    std::vector<R> c;  // c[i] multiplies X^i

    Poly() = default;
    Poly(long v) {  // NOLINT: implicit on purpose, rings convert from integers
        if (v != 0) c.push_back(R(v));
    }
    explicit Poly(std::vector<R> coeffs) : c(std::move(coeffs)) { normalize(); }

    static Poly x() { return Poly(std::vector<R>{R(0), R(1)}); }

    void normalize() {
        while (!c.empty() && ring_is_zero(c.back())) c.pop_back();
    }
    int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
    R coefficient(std::size_t i) const { return i < c.size() ? c[i] : R(0); }

    R eval(const R& at) const {
        R acc(0);
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * at + c[i];
        return acc;
    }

    bool operator==(const Poly&) const = default;
};

template <class R>
bool ring_is_zero(const Poly<R>& p) {
    return p.c.empty();
}

template <class R>
Poly<R> operator+(const Poly<R>& a, const Poly<R>& b) {
    Poly<R> out;
    out.c.resize(std::max(a.c.size(), b.c.size()), R(0));
    for (std::size_t i = 0; i < a.c.size(); ++i) out.c[i] = out.c[i] + a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) out.c[i] = out.c[i] + b.c[i];
    out.normalize();
    return out;
}

template <class R>
Poly<R> operator-(const Poly<R>& a, const Poly<R>& b) {
    Poly<R> out;
    out.c.resize(std::max(a.c.size(), b.c.size()), R(0));
    for (std::size_t i = 0; i < a.c.size(); ++i) out.c[i] = out.c[i] + a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) out.c[i] = out.c[i] - b.c[i];
    out.normalize();
    return out;
}

template <class R>
Poly<R> operator*(const Poly<R>& a, const Poly<R>& b) {
    if (a.c.empty() || b.c.empty()) return Poly<R>();
    Poly<R> out;
    out.c.assign(a.c.size() + b.c.size() - 1, R(0));
    for (std::size_t i = 0; i < a.c.size(); ++i)
        for (std::size_t j = 0; j < b.c.size(); ++j) out.c[i + j] = out.c[i + j] + a.c[i] * b.c[j];
    out.normalize();
    return out;
}

template <class R>
Poly<R>& operator+=(Poly<R>& a, const Poly<R>& b) {
    a = a + b;
    return a;
}

template <class R>
Poly<R>& operator*=(Poly<R>& a, const Poly<R>& b) {
    a = a * b;
    return a;
}

template <class R>
Poly<R> operator/(const Poly<R>& a, long d) {
    if (d == 0) throw std::invalid_argument("Poly: division by zero");
    Poly<R> out = a;
    for (R& v : out.c) v = v / d;
    out.normalize();
    return out;
}

// ---------------------------------------------------------------------------
// Truncation: either or both of a per-variable degree bound and a total-degree
// bound. An exponent vector is kept only if it satisfies every bound present.

struct Truncation {
    std::optional<std::vector<int>> per_variable;
    std::optional<int> total_degree;

    static Truncation by_variable(std::vector<int> bounds) {
        Truncation t;
        t.per_variable = std::move(bounds);
        return t;
    }
    static Truncation by_total_degree(int bound) {
        Truncation t;
        t.total_degree = bound;
        return t;
    }

    bool admits(const std::vector<int>& e) const {
        if (per_variable) {
            if (per_variable->size() != e.size())
                throw std::invalid_argument("Truncation: variable-count mismatch");
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i] > (*per_variable)[i]) return false;
        }
        if (total_degree) {
            int sum = 0;
            for (int x : e) sum += x;
            if (sum > *total_degree) return false;
        }
        return true;
    }

    // Intersection of the admitted exponent sets.
    static Truncation meet(const Truncation& a, const Truncation& b) {
        Truncation out;
        if (a.per_variable && b.per_variable) {
            if (a.per_variable->size() != b.per_variable->size())
                throw std::invalid_argument("Truncation: variable-count mismatch");
            std::vector<int> pv(a.per_variable->size());
            for (std::size_t i = 0; i < pv.size(); ++i)
                pv[i] = std::min((*a.per_variable)[i], (*b.per_variable)[i]);
            out.per_variable = std::move(pv);
        } else if (a.per_variable) {
            out.per_variable = a.per_variable;
        } else if (b.per_variable) {
            out.per_variable = b.per_variable;
        }
        if (a.total_degree && b.total_degree)
            out.total_degree = std::min(*a.total_degree, *b.total_degree);
        else if (a.total_degree)
            out.total_degree = a.total_degree;
        else if (b.total_degree)
            out.total_degree = b.total_degree;
        return out;
    }
};

// ---------------------------------------------------------------------------
// Sparse truncated multivariate series. Absent exponent means zero; explicit
// zeros are never stored. The exponent map is ordered, so iteration (and
// therefore all derived output) is deterministic.

template <class R>
struct MultiSeries {
    int num_vars = 0;
    Truncation trunc;
    std::map<std::vector<int>, R> coeffs;

    static MultiSeries constant(int num_vars, const R& value, Truncation tr) {
        MultiSeries s;
        s.num_vars = num_vars;
        s.trunc = std::move(tr);
        if (!ring_is_zero(value)) s.coeffs.emplace(std::vector<int>(num_vars, 0), value);
        return s;
    }

    static MultiSeries variable(int num_vars, int index, Truncation tr) {
        if (index < 0 || index >= num_vars)
            throw std::invalid_argument("MultiSeries::variable: index out of range");
        MultiSeries s;
        s.num_vars = num_vars;
        s.trunc = std::move(tr);
        std::vector<int> e(num_vars, 0);
        e[index] = 1;
        if (s.trunc.admits(e)) s.coeffs.emplace(std::move(e), R(1));
        return s;
    }

    R coefficient(const std::vector<int>& e) const {
        auto it = coeffs.find(e);
        return it == coeffs.end() ? R(0) : it->second;
    }

    void set(std::vector<int> e, R value) {
        if (static_cast<int>(e.size()) != num_vars)
            throw std::invalid_argument("MultiSeries::set: exponent length mismatch");
        if (!trunc.admits(e)) throw std::invalid_argument("MultiSeries::set: exponent beyond truncation");
        if (ring_is_zero(value))
            coeffs.erase(e);
        else
            coeffs.insert_or_assign(std::move(e), std::move(value));
    }

    bool is_zero() const { return coeffs.empty(); }

    bool operator==(const MultiSeries& other) const {
        return num_vars == other.num_vars && coeffs == other.coeffs;
    }
};

namespace detail {
inline void require_same_vars(int a, int b) {
    if (a != b) throw std::invalid_argument("series: variable-count mismatch");
}
}

template <class R>
MultiSeries<R> series_add(const MultiSeries<R>& a, const MultiSeries<R>& b) {
    detail::require_same_vars(a.num_vars, b.num_vars);
    MultiSeries<R> out;
    out.num_vars = a.num_vars;
    out.trunc = Truncation::meet(a.trunc, b.trunc);
    out.coeffs = a.coeffs;
    for (const auto& [e, v] : b.coeffs) {
        auto [it, inserted] = out.coeffs.try_emplace(e, v);
        if (!inserted) it->second = it->second + v;
    }
    for (auto it = out.coeffs.begin(); it != out.coeffs.end();) {
        if (!out.trunc.admits(it->first) || ring_is_zero(it->second))
            it = out.coeffs.erase(it);
        else
            ++it;
    }
    return out;
}

template <class R>
MultiSeries<R> series_negate(const MultiSeries<R>& a) {
    MultiSeries<R> out = a;
    for (auto& [e, v] : out.coeffs) v = R(0) - v;
    return out;
}

template <class R>
MultiSeries<R> series_sub(const MultiSeries<R>& a, const MultiSeries<R>& b) {
    return series_add(a, series_negate(b));
}

template <class R>
MultiSeries<R> series_mul(const MultiSeries<R>& a, const MultiSeries<R>& b) {
    detail::require_same_vars(a.num_vars, b.num_vars);
    MultiSeries<R> out;
    out.num_vars = a.num_vars;
    out.trunc = Truncation::meet(a.trunc, b.trunc);
    std::vector<int> e(a.num_vars);
    for (const auto& [ea, va] : a.coeffs) {
        for (const auto& [eb, vb] : b.coeffs) {
            for (int i = 0; i < a.num_vars; ++i) e[i] = ea[i] + eb[i];
            if (!out.trunc.admits(e)) continue;
            R prod = va * vb;
            auto [it, inserted] = out.coeffs.try_emplace(e, prod);
            if (!inserted) it->second = it->second + prod;
        }
    }
    for (auto it = out.coeffs.begin(); it != out.coeffs.end();) {
        if (ring_is_zero(it->second))
            it = out.coeffs.erase(it);
        else
            ++it;
    }
    return out;
}

template <class R>
MultiSeries<R> series_scale(const MultiSeries<R>& a, const R& c) {
    MultiSeries<R> out;
    out.num_vars = a.num_vars;
    out.trunc = a.trunc;
    if (ring_is_zero(c)) return out;
    out.coeffs = a.coeffs;
    for (auto it = out.coeffs.begin(); it != out.coeffs.end();) {
        it->second = it->second * c;
        if (ring_is_zero(it->second))
            it = out.coeffs.erase(it);
        else
            ++it;
    }
    return out;
}

template <class R>
MultiSeries<R> series_div_int(const MultiSeries<R>& a, long d) {
    if (d == 0) throw std::invalid_argument("series_div_int: division by zero");
    MultiSeries<R> out = a;
    for (auto it = out.coeffs.begin(); it != out.coeffs.end();) {
        it->second = it->second / d;
        if (ring_is_zero(it->second))
            it = out.coeffs.erase(it);
        else
            ++it;
    }
    return out;
}

template <class R>
MultiSeries<R> operator+(const MultiSeries<R>& a, const MultiSeries<R>& b) { return series_add(a, b); }
template <class R>
MultiSeries<R> operator-(const MultiSeries<R>& a, const MultiSeries<R>& b) { return series_sub(a, b); }
template <class R>
MultiSeries<R> operator*(const MultiSeries<R>& a, const MultiSeries<R>& b) { return series_mul(a, b); }

namespace detail {
// Largest total degree the truncation can admit; caps the power sums in
// exp/log. Every input there has zero constant term, so the k-th power only
// contributes exponents of total degree >= k.
inline long max_total_degree(const Truncation& t, int num_vars) {
    long cap = 0;
    bool bounded = false;
    if (t.per_variable) {
        for (int b : *t.per_variable) cap += b;
        bounded = true;
    }
    if (t.total_degree) {
        cap = bounded ? std::min(cap, static_cast<long>(*t.total_degree))
                      : static_cast<long>(*t.total_degree);
        bounded = true;
    }
    if (!bounded)
        throw std::invalid_argument("series: unbounded truncation (num_vars=" +
                                    std::to_string(num_vars) + ")");
    return cap;
}
}

// exp(a) = sum a^k / k!; requires zero constant term.
template <class R>
MultiSeries<R> series_exp(const MultiSeries<R>& a) {
    if (!ring_is_zero(a.coefficient(std::vector<int>(a.num_vars, 0))))
        throw std::invalid_argument("series_exp: nonzero constant term");
    const long cap = detail::max_total_degree(a.trunc, a.num_vars);
    MultiSeries<R> result = MultiSeries<R>::constant(a.num_vars, R(1), a.trunc);
    MultiSeries<R> term = result;
    for (long k = 1; k <= cap && !term.is_zero(); ++k) {
        term = series_div_int(series_mul(term, a), k);
        result = series_add(result, term);
    }
    return result;
}

// log(a) = sum (-1)^(k+1) (a-1)^k / k; requires constant term 1.
template <class R>
MultiSeries<R> series_log(const MultiSeries<R>& a) {
    if (!ring_is_zero(a.coefficient(std::vector<int>(a.num_vars, 0)) - R(1)))
        throw std::invalid_argument("series_log: constant term is not 1");
    const long cap = detail::max_total_degree(a.trunc, a.num_vars);
    MultiSeries<R> w = series_sub(a, MultiSeries<R>::constant(a.num_vars, R(1), a.trunc));
    MultiSeries<R> result;
    result.num_vars = a.num_vars;
    result.trunc = a.trunc;
    MultiSeries<R> power = MultiSeries<R>::constant(a.num_vars, R(1), a.trunc);
    for (long k = 1; k <= cap; ++k) {
        power = series_mul(power, w);
        if (power.is_zero()) break;
        MultiSeries<R> term = series_div_int(power, k);
        result = (k % 2 == 1) ? series_add(result, term) : series_sub(result, term);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Moment polynomials: p_k(X) = coefficient of s^k in exp(u(s) X + v(s)),
// computed over the polynomial ring in X. Requires u(0) = v(0) = 0 and
// truncations that cover the exponent k. Degree of the result <= sum(k).

template <class R>
struct MomentPolynomial {
    std::vector<int> k;
    Poly<R> poly;
};

template <class R>
MomentPolynomial<R> moment_polynomials(const MultiSeries<R>& u, const MultiSeries<R>& v,
                                       const std::vector<int>& k) {
    detail::require_same_vars(u.num_vars, v.num_vars);
    if (static_cast<int>(k.size()) != u.num_vars)
        throw std::invalid_argument("moment_polynomials: exponent length mismatch");
    for (int x : k)
        if (x < 0) throw std::invalid_argument("moment_polynomials: negative exponent");
    if (!u.trunc.admits(k) || !v.trunc.admits(k))
        throw std::invalid_argument("moment_polynomials: series truncation does not cover the exponent");
    const std::vector<int> zero(u.num_vars, 0);
    if (!ring_is_zero(u.coefficient(zero)) || !ring_is_zero(v.coefficient(zero)))
        throw std::invalid_argument("moment_polynomials: u and v must vanish at 0");

    // Work in the polynomial ring, truncated to the target exponent box:
    // coefficients of u carry one factor of X, coefficients of v none.
    MultiSeries<Poly<R>> w;
    w.num_vars = u.num_vars;
    w.trunc = Truncation::by_variable(k);
    for (const auto& [e, c] : u.coeffs) {
        if (!w.trunc.admits(e)) continue;
        Poly<R> p(std::vector<R>{R(0), c});
        auto [it, inserted] = w.coeffs.try_emplace(e, p);
        if (!inserted) it->second = it->second + p;
    }
    for (const auto& [e, c] : v.coeffs) {
        if (!w.trunc.admits(e)) continue;
        Poly<R> p(std::vector<R>{c});
        auto [it, inserted] = w.coeffs.try_emplace(e, p);
        if (!inserted) it->second = it->second + p;
    }
    for (auto it = w.coeffs.begin(); it != w.coeffs.end();) {
        if (ring_is_zero(it->second))
            it = w.coeffs.erase(it);
        else
            ++it;
    }

    MultiSeries<Poly<R>> e = series_exp(w);
    return MomentPolynomial<R>{k, e.coefficient(k)};
}

}
