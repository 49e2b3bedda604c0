#pragma once

#include <cmath>
#include <complex>

#include <gmpxx.h>

// Small scalar helpers shared by the generic (ring-templated) code paths.

namespace qpow {

inline double magnitude(double x) { return std::fabs(x); }
inline double magnitude(const std::complex<double>& z) { return std::abs(z); }
inline double magnitude(const mpq_class& q) { return std::fabs(q.get_d()); }

inline bool ring_is_zero(double x) { return x == 0.0; }
inline bool ring_is_zero(const std::complex<double>& z) { return z == std::complex<double>(0.0); }
inline bool ring_is_zero(const mpq_class& q) { return sgn(q) == 0; }

}
