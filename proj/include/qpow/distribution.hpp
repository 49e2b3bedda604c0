#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "qpow/errors.hpp"

// Exact finite discrete multivariate distributions and mean-covariance normal
// references. Support points are exact rationals with a cached double mirror:
// counting weights, CDF values, moments, and standardization stay exact, while
// characteristic functions and Gaussian comparisons run in floating point.

namespace qpow {

class LatticeDistribution {
public:
    // Atoms are sorted lexicographically and merged; weights must be positive.
    LatticeDistribution(int dim, std::vector<std::pair<std::vector<mpq_class>, mpz_class>> atoms);

    int dim() const { return dim_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<mpq_class>& point(std::size_t i) const { return points_[i]; }
    const std::vector<double>& point_d(std::size_t i) const { return points_d_[i]; }
    const mpz_class& weight(std::size_t i) const { return weights_[i]; }
    double probability_d(std::size_t i) const { return probs_d_[i]; }
    const mpz_class& total() const { return total_; }

private:
    int dim_;
    std::vector<std::vector<mpq_class>> points_;
    std::vector<std::vector<double>> points_d_;
    std::vector<mpz_class> weights_;
    std::vector<double> probs_d_;
    mpz_class total_;
};

// Convenience constructor for integer-valued support.
LatticeDistribution make_lattice_int(int dim,
                                     std::vector<std::pair<std::vector<long>, mpz_class>> atoms);

// Joint distribution of independent blocks: dimension a.dim()+b.dim().
LatticeDistribution product_distribution(const LatticeDistribution& a,
                                         const LatticeDistribution& b);

// P(X <= z componentwise), exact.
mpq_class cdf(const LatticeDistribution& d, const std::vector<mpq_class>& z);
mpq_class cdf(const LatticeDistribution& d, const std::vector<double>& z);

// E exp(i <t, X>)
std::complex<double> char_fn(const LatticeDistribution& d, const std::vector<double>& t);

// E prod_l X_l^{k_l}, exact.
mpq_class moments(const LatticeDistribution& d, const std::vector<int>& k);

// Support mapped x -> (x - center) / scale, weights unchanged. The double
// scale is interpreted exactly (its rational value), so means computed from
// exact centers are exactly zero after standardization.
LatticeDistribution standardize(const LatticeDistribution& d, const std::vector<mpq_class>& center,
                                double scale);

// Projection onto the listed axes (0-based, strictly increasing), aggregating
// weights of collapsed points.
LatticeDistribution marginal(const LatticeDistribution& d, const std::vector<int>& axes);

// JSON form: {"dim": m, "atoms": [{"x": [..], "w": "<decimal>"}]}
std::string to_json(const LatticeDistribution& d);
LatticeDistribution lattice_from_json(const std::string& text);

struct GaussianSpec {
    int dim = 0;
    std::vector<double> mean;            // zero vector if empty
    std::vector<std::vector<double>> cov;

    // Strictly positive definite covariance (Cholesky succeeds).
    bool non_degenerate() const;
};

// exp(i <mean, t> - t' cov t / 2); well-defined for singular cov too.
std::complex<double> gaussian_char_fn(const GaussianSpec& g, const std::vector<double>& t);

// CDF of the normal distribution, within tol of the true value, for dim <= 3.
// Computed by quadrature of the density over a box whose omitted tail mass is
// below tol/10; the innermost coordinate integral of the conditional density
// is carried out analytically for dim >= 2.
double gaussian_cdf(const GaussianSpec& g, const std::vector<double>& z, double tol);

GaussianSpec gaussian_marginal(const GaussianSpec& g, const std::vector<int>& axes);

// sup over x of |F_d(x) - Phi(x)| for dim <= 3, within tol of the true value.
// The candidate set runs over all corners of the per-axis support grids with
// every strict/non-strict pattern (exact left limits), for every nonempty axis
// subset (the sup can be approached as the remaining coordinates grow).
double kolmogorov_distance(const LatticeDistribution& d, const GaussianSpec& g, double tol);

// Exact sup distance between two finite lattice distributions.
mpq_class kolmogorov_distance(const LatticeDistribution& a, const LatticeDistribution& b);

}
