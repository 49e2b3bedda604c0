#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpow/distribution.hpp"

namespace qpow {

// One evaluated bound. rhs_total = integral_term + marginal_term +
// smoothing_term always holds; for the recursive variant marginal_term is the
// fully expanded replacement of the exact marginal sups and marginal_sups
// holds the per-subset recursive bounds instead of exact sup distances.
struct BoundReport {
    int dim = 0;
    double T = 0.0;
    double integral_term = 0.0;
    double marginal_term = 0.0;
    double smoothing_term = 0.0;
    double rhs_total = 0.0;
    std::optional<double> lhs_sup;
    std::map<std::string, double> marginal_sups;        // key: 1-based axes, "1,3"
    std::map<std::string, double> subset_multipliers;   // recursive expansion only
    double quad_error = 0.0;
    bool quad_converged = true;
    bool recursive = false;
};

// Maximum of the j-th marginal density, 1/sqrt(2*pi*cov[j][j]).
// An upper bound on the partial-derivative sup of the Gaussian CDF.
double gaussian_partial_sup(const GaussianSpec& g, int axis);

// Bound with exact marginal sup-differences: quadrature of the partition
// difference quotient over [-T,T]^m, plus Fubini-weighted exact Kolmogorov
// distances of all proper nonempty marginals, plus the smoothing term
// (2*sum_j A_j)(c1(m)+c2)/T. cdf_tol controls the Gaussian CDF evaluations
// inside the marginal sups; tol is the quadrature relative tolerance.
BoundReport be_rhs(const LatticeDistribution& x, const GaussianSpec& g, double T, double tol,
                   double cdf_tol = 1e-4);

// Fully expanded bound: the marginal sups are recursively replaced by their
// own bounds until dimension 1, leaving only integrals and smoothing terms.
// subset_multipliers records the accumulated constant in front of each
// nonempty axis subset's contribution.
BoundReport be_rhs_recursive(const LatticeDistribution& x, const GaussianSpec& g, double T,
                             double tol, double cdf_tol = 1e-4);

struct VerifyRow {
    double T = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    BoundReport report;
};

// Evaluates lhs = kolmogorov_distance(x, g) once and be_rhs for every T.
// holds <=> lhs <= rhs + quadrature error + cdf_tol slack.
std::vector<VerifyRow> verify_inequality(const LatticeDistribution& x, const GaussianSpec& g,
                                         const std::vector<double>& T_list, double tol,
                                         double cdf_tol = 1e-4);

std::string bound_report_json(const BoundReport& r);

// "T,integral,marginal,smoothing,rhs,lhs" with lhs empty when absent.
std::string bound_report_csv_row(const BoundReport& r);

}  // namespace qpow
