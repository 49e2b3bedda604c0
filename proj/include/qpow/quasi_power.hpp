#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "qpow/distribution.hpp"
#include "qpow/series.hpp"

namespace qpow {

// Distribution of the sum of two independent vectors; exact weights.
LatticeDistribution convolve(const LatticeDistribution& a, const LatticeDistribution& b);

// n-fold convolution power by binary powering, n >= 1.
LatticeDistribution convolution_power(const LatticeDistribution& base, long n);

// Closed-form data for a family whose scaled cumulant series is known
// exactly: log E(e^<Omega_n, s>) = u(s) * phi_n + v(s).
struct AnalyticData {
    MultiSeries<mpq_class> u;
    MultiSeries<mpq_class> v;
    std::vector<mpq_class> grad_u0;                // du/ds_j at 0
    std::vector<std::vector<mpq_class>> hess_u0;   // d2u/ds_i ds_j at 0
};

// A sequence of exact distributions Omega_n with scale parameter phi_n and
// error scale kappa_n (infinity when the representation is exact).
struct QuasiPowerFamily {
    std::string name;
    int dim = 0;
    std::function<LatticeDistribution(long)> generator;
    std::function<double(long)> phi;
    std::function<double(long)> kappa;
    std::optional<AnalyticData> analytic;
};

// Family of n-fold sums of iid copies of base: u = log(mgf of base), v = 0,
// phi_n = n, kappa_n = infinity. The cumulant series is truncated at total
// degree series_order.
QuasiPowerFamily iid_sum_family(const LatticeDistribution& base, int series_order = 6,
                                const std::string& name = "iid_sum");

enum class StandardizeMode { ExactMoments, Analytic };

// (Omega_n - center)/sqrt(phi_n) together with its limit Gaussian.
// Analytic mode: center = grad_u0 * phi_n, Sigma = hess_u0.
// Exact-moments mode: center = exact mean, Sigma = exact covariance / phi_n;
// coordinates whose exact covariance block is singular are dropped (greedily,
// in axis order) and the surviving axes are listed in kept_axes. A fully
// degenerate covariance is an error pointing at the degenerate demo.
struct StandardizedPair {
    LatticeDistribution dist;
    GaussianSpec gaussian;
    std::vector<int> kept_axes;   // 0-based axes of the original vector
};
StandardizedPair standardized_distribution(const QuasiPowerFamily& fam, long n,
                                           StandardizeMode mode);

struct ConvergenceRow {
    long n = 0;
    double phi_n = 0.0;
    double distance = 0.0;     // Kolmogorov distance of standardized vs Gaussian
    double normalized = 0.0;   // distance * sqrt(phi_n)
};

// One row per n, sorted by n. tol is the Gaussian CDF tolerance of the
// distance computation.
std::vector<ConvergenceRow> convergence_study(const QuasiPowerFamily& fam,
                                              const std::vector<long>& n_list,
                                              StandardizeMode mode, double tol);

struct MomentRow {
    long n = 0;
    mpq_class lhs;         // exact E(prod Omega^k) / prod k!
    mpq_class rhs;         // p_k evaluated at phi_n
    mpq_class abs_error;   // |lhs - rhs|, exactly 0 for exact families
};

// Checks the moment identity (1/prod k!) E(prod Omega_n^k) = p_k(phi_n)
// where p_k is the coefficient polynomial of e^(u*X+v). Requires analytic
// data; all arithmetic exact.
std::vector<MomentRow> moment_check(const QuasiPowerFamily& fam, const std::vector<int>& k,
                                    const std::vector<long>& n_list);

struct DegenerateRow {
    long n = 0;
    mpq_class distance;
};

// The +-1 coin scaled by 1/sqrt(n) against its point-mass limit at 0: the
// sup distance is exactly 1/2 for every n, so no uniform speed can exist.
std::vector<DegenerateRow> degenerate_demo(const std::vector<long>& n_list);

}  // namespace qpow
