#include "qpow/berry_esseen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "qpow/lambda.hpp"
#include "qpow/partitions.hpp"
#include "qpow/quadrature.hpp"

namespace qpow {

double gaussian_partial_sup(const GaussianSpec& g, int axis) {
    if (axis < 0 || axis >= g.dim) throw std::invalid_argument("gaussian_partial_sup: bad axis");
    if (!g.non_degenerate())
        throw std::domain_error("gaussian_partial_sup: degenerate covariance matrix");
    return 1.0 / std::sqrt(2.0 * std::numbers::pi * g.cov[axis][axis]);
}

namespace {

std::string axes_key(const std::vector<int>& axes) {
    std::string key;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (i) key += ',';
        key += std::to_string(axes[i] + 1);
    }
    return key;
}

std::vector<int> mask_axes(unsigned mask, int m) {
    std::vector<int> axes;
    for (int a = 0; a < m; ++a)
        if (mask >> a & 1u) axes.push_back(a);
    return axes;
}

struct IntegralResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
};

// Dense per-axis view of a 2-D lattice for the phase-table evaluation below.
struct JointTable {
    std::vector<double> x1, x2;   // distinct axis values
    std::vector<double> w;        // joint probabilities, x1-major
    std::vector<double> w1, w2;   // marginal probabilities
};

JointTable joint_table(const LatticeDistribution& d) {
    JointTable tab;
    {
        std::vector<double> v1, v2;
        for (std::size_t i = 0; i < d.size(); ++i) {
            v1.push_back(d.point_d(i)[0]);
            v2.push_back(d.point_d(i)[1]);
        }
        std::sort(v1.begin(), v1.end());
        v1.erase(std::unique(v1.begin(), v1.end()), v1.end());
        std::sort(v2.begin(), v2.end());
        v2.erase(std::unique(v2.begin(), v2.end()), v2.end());
        tab.x1 = std::move(v1);
        tab.x2 = std::move(v2);
    }
    const std::size_t n1 = tab.x1.size(), n2 = tab.x2.size();
    tab.w.assign(n1 * n2, 0.0);
    tab.w1.assign(n1, 0.0);
    tab.w2.assign(n2, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto i1 = static_cast<std::size_t>(
            std::lower_bound(tab.x1.begin(), tab.x1.end(), d.point_d(i)[0]) - tab.x1.begin());
        const auto i2 = static_cast<std::size_t>(
            std::lower_bound(tab.x2.begin(), tab.x2.end(), d.point_d(i)[1]) - tab.x2.begin());
        const double p = d.probability_d(i);
        tab.w[i1 * n2 + i2] += p;
        tab.w1[i1] += p;
        tab.w2[i2] += p;
    }
    return tab;
}

// Raw integral sum (before the 2/(2pi)^m constant) at one node resolution.
// The joint characteristic function on the full t1 x t2 node grid is built
// from per-axis phase tables so the cost is (n1*n2 + N1*n1)*N2 instead of
// N1*N2*atoms.
double m2_level_sum(const JointTable& tab, const GaussianSpec& g, const std::vector<Panel>& box,
                    int npp) {
    using cd = std::complex<double>;
    const QuadratureGrid grid = QuadratureGrid::for_box(box, npp, 2);
    const AxisNodes t1 = axis_nodes(grid, 0);
    const AxisNodes t2 = axis_nodes(grid, 1);
    const std::size_t big1 = t1.x.size(), big2 = t2.x.size();
    const std::size_t n1 = tab.x1.size(), n2 = tab.x2.size();

    std::vector<cd> a1(big1 * n1), a2(big2 * n2);
    for (std::size_t i = 0; i < big1; ++i)
        for (std::size_t v = 0; v < n1; ++v)
            a1[i * n1 + v] = std::polar(1.0, t1.x[i] * tab.x1[v]);
    for (std::size_t j = 0; j < big2; ++j)
        for (std::size_t v = 0; v < n2; ++v)
            a2[j * n2 + v] = std::polar(1.0, t2.x[j] * tab.x2[v]);

    // mid[v1][j] = sum_v2 w[v1][v2] * a2[j][v2]
    std::vector<cd> mid(n1 * big2, cd(0.0, 0.0));
    for (std::size_t v1 = 0; v1 < n1; ++v1)
        for (std::size_t v2 = 0; v2 < n2; ++v2) {
            const double wv = tab.w[v1 * n2 + v2];
            if (wv == 0.0) continue;
            for (std::size_t j = 0; j < big2; ++j) mid[v1 * big2 + j] += wv * a2[j * n2 + v2];
        }

    std::vector<cd> phi1(big1, cd(0.0, 0.0)), phi2(big2, cd(0.0, 0.0));
    for (std::size_t i = 0; i < big1; ++i)
        for (std::size_t v = 0; v < n1; ++v) phi1[i] += tab.w1[v] * a1[i * n1 + v];
    for (std::size_t j = 0; j < big2; ++j)
        for (std::size_t v = 0; v < n2; ++v) phi2[j] += tab.w2[v] * a2[j * n2 + v];

    const GaussianSpec g1 = gaussian_marginal(g, {0});
    const GaussianSpec g2 = gaussian_marginal(g, {1});

    double acc = 0.0;
    std::vector<cd> row(big2);
    for (std::size_t i = 0; i < big1; ++i) {
        for (std::size_t j = 0; j < big2; ++j) row[j] = cd(0.0, 0.0);
        for (std::size_t v1 = 0; v1 < n1; ++v1) {
            const cd f = a1[i * n1 + v1];
            for (std::size_t j = 0; j < big2; ++j) row[j] += f * mid[v1 * big2 + j];
        }
        const cd gphi1 = gaussian_char_fn(g1, {t1.x[i]});
        for (std::size_t j = 0; j < big2; ++j) {
            const cd lattice = row[j] - phi1[i] * phi2[j];
            const cd gauss = gaussian_char_fn(g, {t1.x[i], t2.x[j]}) -
                             gphi1 * gaussian_char_fn(g2, {t2.x[j]});
            acc += t1.w[i] * t2.w[j] * std::abs(lattice - gauss) /
                   std::fabs(t1.x[i] * t2.x[j]);
        }
    }
    return acc;
}

// Quadrature of |Lambda(phi_X) - Lambda(phi_Y)| / prod |t_l| over [-T,T]^m,
// scaled by 2/(2pi)^m, with node doubling until two levels agree.
IntegralResult lambda_integral(const LatticeDistribution& x, const GaussianSpec& g, double T,
                               double tol) {
    const int m = x.dim();
    const double scale = 2.0 / std::pow(2.0 * std::numbers::pi, m);
    std::vector<Panel> box(m, Panel{-T, T});

    if (m == 2) {
        const JointTable tab = joint_table(x);
        IntegralResult res;
        int npp = 16;
        double prev = m2_level_sum(tab, g, box, npp);
        for (int level = 1; level <= 5; ++level) {
            npp *= 2;
            const double next = m2_level_sum(tab, g, box, npp);
            const double delta = std::fabs(next - prev);
            res.value = scale * next;
            res.error = scale * delta;
            if (delta <= std::max(tol * std::fabs(next), 1e-9)) {
                res.converged = true;
                return res;
            }
            prev = next;
        }
        return res;
    }

    auto hx = [&](const std::vector<double>& t) { return char_fn(x, t); };
    auto hy = [&](const std::vector<double>& t) { return gaussian_char_fn(g, t); };
    auto f = [&](const std::vector<double>& t) {
        return std::abs(lambda_quotient(hx, t) - lambda_quotient(hy, t));
    };
    RefineOptions opt;
    opt.rel_tol = tol;
    opt.abs_floor = 1e-9;
    opt.max_level = 5;
    opt.initial_nodes_per_panel = m == 3 ? 6 : 16;
    auto r = refine_until(f, box, opt);
    return IntegralResult{scale * r.value, scale * r.error_estimate, r.converged};
}

void check_be_inputs(const LatticeDistribution& x, const GaussianSpec& g, double T, double tol,
                     double cdf_tol) {
    if (x.dim() != g.dim) throw std::invalid_argument("be_rhs: dimension mismatch");
    if (x.dim() > 3) throw capacity_error("be_rhs: dimension larger than 3");
    if (!(T > 0)) throw std::invalid_argument("be_rhs: T must be positive");
    if (!(tol > 0) || !(cdf_tol > 0))
        throw std::invalid_argument("be_rhs: tolerances must be positive");
    if (!g.non_degenerate()) throw std::domain_error("be_rhs: degenerate covariance matrix");
}

}  // namespace

BoundReport be_rhs(const LatticeDistribution& x, const GaussianSpec& g, double T, double tol,
                   double cdf_tol) {
    check_be_inputs(x, g, T, tol, cdf_tol);
    const int m = x.dim();
    BoundReport r;
    r.dim = m;
    r.T = T;

    const IntegralResult integral = lambda_integral(x, g, T, tol);
    r.integral_term = integral.value;
    r.quad_error = integral.error;
    r.quad_converged = integral.converged;

    for (unsigned mask = 1; mask + 1 < (1u << m); ++mask) {
        const std::vector<int> axes = mask_axes(mask, m);
        const double sup =
            kolmogorov_distance(marginal(x, axes), gaussian_marginal(g, axes), cdf_tol);
        r.marginal_sups[axes_key(axes)] = sup;
        r.marginal_term += 2.0 * fubini(m - static_cast<int>(axes.size())).get_d() * sup;
    }

    double sum_a = 0.0;
    for (int j = 0; j < m; ++j) sum_a += gaussian_partial_sup(g, j);
    const SmoothingConstants sc = smoothing_constants(m);
    r.smoothing_term = 2.0 * sum_a * (sc.c1 + sc.c2) / T;

    r.rhs_total = r.integral_term + r.marginal_term + r.smoothing_term;
    return r;
}

BoundReport be_rhs_recursive(const LatticeDistribution& x, const GaussianSpec& g, double T,
                             double tol, double cdf_tol) {
    check_be_inputs(x, g, T, tol, cdf_tol);
    const int m = x.dim();
    const unsigned full = (1u << m) - 1;

    // Flatten the recursion: every subset K contributes its own integral and
    // smoothing term times an accumulated multiplier. Proper subsets J of K
    // inherit mult[K] * 2 * fubini(|K|-|J|).
    std::vector<double> mult(full + 1, 0.0);
    mult[full] = 1.0;
    std::vector<unsigned> order;
    for (unsigned mask = 1; mask <= full; ++mask) order.push_back(mask);
    std::sort(order.begin(), order.end(), [](unsigned a, unsigned b) {
        const int pa = std::popcount(a), pb = std::popcount(b);
        return pa != pb ? pa > pb : a < b;
    });
    for (unsigned mask : order) {
        if (std::popcount(mask) < 2 || mult[mask] == 0.0) continue;
        for (unsigned sub = (mask - 1) & mask; sub != 0; sub = (sub - 1) & mask)
            mult[sub] += mult[mask] * 2.0 *
                         fubini(std::popcount(mask) - std::popcount(sub)).get_d();
    }

    BoundReport r;
    r.dim = m;
    r.T = T;
    r.recursive = true;
    r.quad_converged = true;

    std::vector<double> own(full + 1, 0.0);   // I_K + smoothing_K
    std::vector<double> bound(full + 1, 0.0); // fully expanded R(K)
    for (unsigned mask = 1; mask <= full; ++mask) {
        const std::vector<int> axes = mask_axes(mask, m);
        const int k = static_cast<int>(axes.size());
        const LatticeDistribution xk = mask == full ? x : marginal(x, axes);
        const GaussianSpec gk = mask == full ? g : gaussian_marginal(g, axes);

        const IntegralResult integral = lambda_integral(xk, gk, T, tol);
        r.quad_error += mult[mask] * integral.error;
        if (!integral.converged) r.quad_converged = false;

        double sum_a = 0.0;
        for (int j = 0; j < k; ++j) sum_a += gaussian_partial_sup(gk, j);
        const SmoothingConstants sc = smoothing_constants(k);
        const double smooth = 2.0 * sum_a * (sc.c1 + sc.c2) / T;

        own[mask] = integral.value + smooth;
        if (mask == full) {
            r.integral_term = integral.value;
            r.smoothing_term = smooth;
        } else {
            r.marginal_term += mult[mask] * own[mask];
        }
        r.subset_multipliers[axes_key(axes)] = mult[mask];
    }
    // bottom-up expanded bound per subset, reported in marginal_sups
    for (unsigned mask : std::vector<unsigned>(order.rbegin(), order.rend())) {
        double b = own[mask];
        for (unsigned sub = (mask - 1) & mask; sub != 0; sub = (sub - 1) & mask)
            b += 2.0 * fubini(std::popcount(mask) - std::popcount(sub)).get_d() * bound[sub];
        bound[mask] = b;
        if (mask != full) r.marginal_sups[axes_key(mask_axes(mask, m))] = b;
    }

    r.rhs_total = r.integral_term + r.marginal_term + r.smoothing_term;
    return r;
}

std::vector<VerifyRow> verify_inequality(const LatticeDistribution& x, const GaussianSpec& g,
                                         const std::vector<double>& T_list, double tol,
                                         double cdf_tol) {
    if (T_list.empty()) throw std::invalid_argument("verify_inequality: empty T list");
    const double lhs = kolmogorov_distance(x, g, cdf_tol);
    std::vector<VerifyRow> rows;
    rows.reserve(T_list.size());
    for (double T : T_list) {
        VerifyRow row;
        row.T = T;
        row.lhs = lhs;
        row.report = be_rhs(x, g, T, tol, cdf_tol);
        row.report.lhs_sup = lhs;
        row.rhs = row.report.rhs_total;
        row.holds = lhs <= row.rhs + row.report.quad_error + cdf_tol + 1e-12;
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {
std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}
}  // namespace

std::string bound_report_json(const BoundReport& r) {
    nlohmann::json j;
    j["dim"] = r.dim;
    j["T"] = r.T;
    j["integral_term"] = r.integral_term;
    j["marginal_term"] = r.marginal_term;
    j["smoothing_term"] = r.smoothing_term;
    j["rhs_total"] = r.rhs_total;
    if (r.lhs_sup)
        j["lhs_sup"] = *r.lhs_sup;
    else
        j["lhs_sup"] = nullptr;
    j["marginal_sups"] = r.marginal_sups;
    j["subset_multipliers"] = r.subset_multipliers;
    j["quad_error"] = r.quad_error;
    j["quad_converged"] = r.quad_converged;
    j["recursive"] = r.recursive;
    return j.dump();
}

std::string bound_report_csv_row(const BoundReport& r) {
    std::string row = fmt_g(r.T);
    row += ',' + fmt_g(r.integral_term);
    row += ',' + fmt_g(r.marginal_term);
    row += ',' + fmt_g(r.smoothing_term);
    row += ',' + fmt_g(r.rhs_total);
    row += ',';
    if (r.lhs_sup) row += fmt_g(*r.lhs_sup);
    return row;
}

}
