#include "qpow/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "qpow/quadrature.hpp"

namespace qpow {

namespace {

mpq_class exact_ratio(const mpz_class& num, const mpz_class& den) {
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

double normal_cdf_1d(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf_1d(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Smallest radius r (in standard deviations) with dim * tail(r) below bound,
// where tail(r) is the Mills-ratio bound on P(Z > r).
double tail_radius(double bound, int dim) {
    for (double r = 4.0; r <= 40.0; r += 0.5) {
        const double tail = normal_pdf_1d(r) / r;
        if (dim * tail < bound) return r;
    }
    return 40.0;
}

bool try_cholesky(const std::vector<std::vector<double>>& a, std::vector<std::vector<double>>& l) {
    const std::size_t n = a.size();
    l.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s)) return false;
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    return true;
}

}  // namespace

LatticeDistribution::LatticeDistribution(
    int dim, std::vector<std::pair<std::vector<mpq_class>, mpz_class>> atoms)
    : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("LatticeDistribution: dimension must be positive");
    if (atoms.empty()) throw std::invalid_argument("LatticeDistribution: no atoms");
    for (const auto& [x, w] : atoms) {
        if (static_cast<int>(x.size()) != dim)
            throw std::invalid_argument("LatticeDistribution: support point has wrong dimension");
        if (w <= 0) throw std::invalid_argument("LatticeDistribution: weights must be positive");
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    total_ = 0;
    for (auto& [x, w] : atoms) {
        if (!points_.empty() && points_.back() == x) {
            weights_.back() += w;
        } else {
            points_.push_back(std::move(x));
            weights_.push_back(w);
        }
        total_ += w;
    }
    points_d_.reserve(points_.size());
    probs_d_.reserve(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        std::vector<double> pd(dim_);
        for (int a = 0; a < dim_; ++a) pd[a] = points_[i][a].get_d();
        points_d_.push_back(std::move(pd));
        probs_d_.push_back(exact_ratio(weights_[i], total_).get_d());
    }
}

LatticeDistribution make_lattice_int(int dim,
                                     std::vector<std::pair<std::vector<long>, mpz_class>> atoms) {
    std::vector<std::pair<std::vector<mpq_class>, mpz_class>> out;
    out.reserve(atoms.size());
    for (auto& [x, w] : atoms) {
        std::vector<mpq_class> q(x.begin(), x.end());
        out.emplace_back(std::move(q), std::move(w));
    }
    return LatticeDistribution(dim, std::move(out));
}

LatticeDistribution product_distribution(const LatticeDistribution& a,
                                         const LatticeDistribution& b) {
    std::vector<std::pair<std::vector<mpq_class>, mpz_class>> atoms;
    atoms.reserve(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            std::vector<mpq_class> x = a.point(i);
            x.insert(x.end(), b.point(j).begin(), b.point(j).end());
            atoms.emplace_back(std::move(x), a.weight(i) * b.weight(j));
        }
    return LatticeDistribution(a.dim() + b.dim(), std::move(atoms));
}

mpq_class cdf(const LatticeDistribution& d, const std::vector<mpq_class>& z) {
    if (static_cast<int>(z.size()) != d.dim())
        throw std::invalid_argument("cdf: dimension mismatch");
    mpz_class acc = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        bool inside = true;
        for (int a = 0; a < d.dim() && inside; ++a) inside = d.point(i)[a] <= z[a];
        if (inside) acc += d.weight(i);
    }
    return exact_ratio(acc, d.total());
}

mpq_class cdf(const LatticeDistribution& d, const std::vector<double>& z) {
    std::vector<mpq_class> zq;
    zq.reserve(z.size());
    for (double v : z) {
        if (!std::isfinite(v)) throw std::invalid_argument("cdf: non-finite threshold");
        zq.emplace_back(v);
    }
    return cdf(d, zq);
}

std::complex<double> char_fn(const LatticeDistribution& d, const std::vector<double>& t) {
    if (static_cast<int>(t.size()) != d.dim())
        throw std::invalid_argument("char_fn: dimension mismatch");
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        double angle = 0.0;
        for (int a = 0; a < d.dim(); ++a) angle += d.point_d(i)[a] * t[a];
        acc += d.probability_d(i) * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    return acc;
}

mpq_class moments(const LatticeDistribution& d, const std::vector<int>& k) {
    if (static_cast<int>(k.size()) != d.dim())
        throw std::invalid_argument("moments: dimension mismatch");
    for (int e : k)
        if (e < 0) throw std::invalid_argument("moments: negative exponent");
    mpq_class acc = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        mpq_class term(d.weight(i));
        for (int a = 0; a < d.dim(); ++a)
            for (int e = 0; e < k[a]; ++e) term *= d.point(i)[a];
        acc += term;
    }
    return acc / mpq_class(d.total());
}

LatticeDistribution standardize(const LatticeDistribution& d, const std::vector<mpq_class>& center,
                                double scale) {
    if (static_cast<int>(center.size()) != d.dim())
        throw std::invalid_argument("standardize: dimension mismatch");
    if (!(scale > 0) || !std::isfinite(scale))
        throw std::invalid_argument("standardize: scale must be positive");
    const mpq_class inv = 1 / mpq_class(scale);
    std::vector<std::pair<std::vector<mpq_class>, mpz_class>> atoms;
    atoms.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::vector<mpq_class> x(d.dim());
        for (int a = 0; a < d.dim(); ++a) x[a] = (d.point(i)[a] - center[a]) * inv;
        atoms.emplace_back(std::move(x), d.weight(i));
    }
    return LatticeDistribution(d.dim(), std::move(atoms));
}

namespace {
void check_axes(const std::vector<int>& axes, int dim, const char* where) {
    if (axes.empty()) throw std::invalid_argument(std::string(where) + ": empty axis list");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (axes[i] < 0 || axes[i] >= dim)
            throw std::invalid_argument(std::string(where) + ": axis out of range");
        if (i > 0 && axes[i] <= axes[i - 1])
            throw std::invalid_argument(std::string(where) + ": axes must be strictly increasing");
    }
}
}  // namespace

LatticeDistribution marginal(const LatticeDistribution& d, const std::vector<int>& axes) {
    check_axes(axes, d.dim(), "marginal");
    std::map<std::vector<mpq_class>, mpz_class> agg;
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::vector<mpq_class> x;
        x.reserve(axes.size());
        for (int a : axes) x.push_back(d.point(i)[a]);
        agg[std::move(x)] += d.weight(i);
    }
    std::vector<std::pair<std::vector<mpq_class>, mpz_class>> atoms;
    atoms.reserve(agg.size());
    for (auto& [x, w] : agg) atoms.emplace_back(x, w);
    return LatticeDistribution(static_cast<int>(axes.size()), std::move(atoms));
}

std::string to_json(const LatticeDistribution& d) {
    nlohmann::json j;
    j["dim"] = d.dim();
    nlohmann::json atoms = nlohmann::json::array();
    for (std::size_t i = 0; i < d.size(); ++i) {
        nlohmann::json a;
        a["x"] = d.point_d(i);
        a["w"] = d.weight(i).get_str();
        atoms.push_back(std::move(a));
    }
    j["atoms"] = std::move(atoms);
    return j.dump();
}

LatticeDistribution lattice_from_json(const std::string& text) {
    int dim = 0;
    std::vector<std::pair<std::vector<mpq_class>, mpz_class>> atoms;
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        dim = j.at("dim").get<int>();
        for (const auto& a : j.at("atoms")) {
            std::vector<mpq_class> x;
            for (const auto& v : a.at("x")) x.emplace_back(v.get<double>());
            mpz_class w;
            if (a.at("w").is_string())
                w = mpz_class(a.at("w").get<std::string>());
            else
                w = mpz_class(a.at("w").get<long>());
            atoms.emplace_back(std::move(x), std::move(w));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("lattice JSON: ") + e.what());
    }
    return LatticeDistribution(dim, std::move(atoms));
}

bool GaussianSpec::non_degenerate() const {
    if (dim < 1 || static_cast<int>(cov.size()) != dim) return false;
    for (const auto& row : cov)
        if (static_cast<int>(row.size()) != dim) return false;
    std::vector<std::vector<double>> l;
    return try_cholesky(cov, l);
}

std::complex<double> gaussian_char_fn(const GaussianSpec& g, const std::vector<double>& t) {
    if (static_cast<int>(t.size()) != g.dim)
        throw std::invalid_argument("gaussian_char_fn: dimension mismatch");
    double dot = 0.0;
    if (!g.mean.empty())
        for (int a = 0; a < g.dim; ++a) dot += g.mean[a] * t[a];
    double q = 0.0;
    for (int i = 0; i < g.dim; ++i)
        for (int j = 0; j < g.dim; ++j) q += t[i] * g.cov[i][j] * t[j];
    const double mag = std::exp(-0.5 * q);
    return {mag * std::cos(dot), mag * std::sin(dot)};
}

namespace {

double mean_of(const GaussianSpec& g, int axis) { return g.mean.empty() ? 0.0 : g.mean[axis]; }

// CDF engine shared by the public gaussian_cdf (dim >= 2) and the Kolmogorov
// corner evaluations. The innermost coordinate is integrated analytically.
double gauss_cdf_engine(const GaussianSpec& g, const std::vector<double>& z, double tol);

double gauss_cdf_1d_quadrature(const GaussianSpec& g, double z, double tol) {
    const double mu = mean_of(g, 0);
    const double sigma = std::sqrt(g.cov[0][0]);
    const double r = tail_radius(tol / 10.0, 1);
    const double lo = mu - r * sigma;
    const double hi = std::min(z, mu + r * sigma);
    if (hi <= lo) return 0.0;
    auto density = [&](const std::vector<double>& y) {
        return normal_pdf_1d((y[0] - mu) / sigma) / sigma;
    };
    RefineOptions opt;
    opt.rel_tol = tol / 10.0;
    opt.abs_floor = tol / 20.0;
    opt.max_level = 6;
    auto res = refine_until(density, std::vector<Panel>{{lo, hi}}, opt);
    return res.value;
}

double gauss_cdf_2d(const GaussianSpec& g, const std::vector<double>& z, double tol) {
    const double mu1 = mean_of(g, 0), mu2 = mean_of(g, 1);
    const double c11 = g.cov[0][0], c12 = g.cov[0][1], c22 = g.cov[1][1];
    const double sigma1 = std::sqrt(c11);
    const double slope = c12 / c11;
    const double cond_sd = std::sqrt(c22 - c12 * c12 / c11);
    const double r = tail_radius(tol / 10.0, 2);
    const double lo = mu1 - r * sigma1;
    const double hi = std::min(z[0], mu1 + r * sigma1);
    if (hi <= lo) return 0.0;
    auto integrand = [&](const std::vector<double>& y) {
        const double y1 = y[0];
        const double cm = mu2 + slope * (y1 - mu1);
        return normal_pdf_1d((y1 - mu1) / sigma1) / sigma1 * normal_cdf_1d((z[1] - cm) / cond_sd);
    };
    RefineOptions opt;
    opt.rel_tol = tol / 10.0;
    opt.abs_floor = tol / 20.0;
    opt.max_level = 6;
    auto res = refine_until(integrand, std::vector<Panel>{{lo, hi}}, opt);
    return res.value;
}

double gauss_cdf_3d(const GaussianSpec& g, const std::vector<double>& z, double tol) {
    const double mu1 = mean_of(g, 0), mu2 = mean_of(g, 1), mu3 = mean_of(g, 2);
    const double c11 = g.cov[0][0], c12 = g.cov[0][1], c22 = g.cov[1][1];
    const double c13 = g.cov[0][2], c23 = g.cov[1][2], c33 = g.cov[2][2];
    const double det2 = c11 * c22 - c12 * c12;
    // conditional of the third coordinate given the first two
    const double b1 = (c13 * c22 - c23 * c12) / det2;
    const double b2 = (c23 * c11 - c13 * c12) / det2;
    const double cond_sd = std::sqrt(c33 - b1 * c13 - b2 * c23);
    const double sigma1 = std::sqrt(c11), sigma2 = std::sqrt(c22);
    const double r = tail_radius(tol / 10.0, 3);
    const double lo1 = mu1 - r * sigma1, hi1 = std::min(z[0], mu1 + r * sigma1);
    const double lo2 = mu2 - r * sigma2, hi2 = std::min(z[1], mu2 + r * sigma2);
    if (hi1 <= lo1 || hi2 <= lo2) return 0.0;
    const double norm2 = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det2));
    auto integrand = [&](const std::vector<double>& y) {
        const double d1 = y[0] - mu1, d2 = y[1] - mu2;
        const double q = (c22 * d1 * d1 - 2.0 * c12 * d1 * d2 + c11 * d2 * d2) / det2;
        const double cm = mu3 + b1 * d1 + b2 * d2;
        return norm2 * std::exp(-0.5 * q) * normal_cdf_1d((z[2] - cm) / cond_sd);
    };
    RefineOptions opt;
    opt.rel_tol = tol / 10.0;
    opt.abs_floor = tol / 20.0;
    opt.max_level = 6;
    opt.initial_nodes_per_panel = 12;
    auto res = refine_until(integrand, std::vector<Panel>{{lo1, hi1}, {lo2, hi2}}, opt);
    return res.value;
}

double gauss_cdf_engine(const GaussianSpec& g, const std::vector<double>& z, double tol) {
    switch (g.dim) {
        case 1:
            return normal_cdf_1d((z[0] - mean_of(g, 0)) / std::sqrt(g.cov[0][0]));
        case 2:
            return gauss_cdf_2d(g, z, tol);
        default:
            return gauss_cdf_3d(g, z, tol);
    }
}

void check_gaussian_query(const GaussianSpec& g, std::size_t zdim, double tol, const char* where) {
    if (g.dim < 1) throw std::invalid_argument(std::string(where) + ": empty Gaussian");
    if (g.dim > 3) throw capacity_error(std::string(where) + ": dimension larger than 3");
    if (static_cast<int>(zdim) != g.dim)
        throw std::invalid_argument(std::string(where) + ": dimension mismatch");
    if (!(tol > 0)) throw std::invalid_argument(std::string(where) + ": tol must be positive");
    if (!g.non_degenerate())
        throw std::domain_error(std::string(where) + ": degenerate covariance matrix");
}

}  // namespace

double gaussian_cdf(const GaussianSpec& g, const std::vector<double>& z, double tol) {
    check_gaussian_query(g, z.size(), tol, "gaussian_cdf");
    if (g.dim == 1) return gauss_cdf_1d_quadrature(g, z[0], tol);
    return gauss_cdf_engine(g, z, tol);
}

GaussianSpec gaussian_marginal(const GaussianSpec& g, const std::vector<int>& axes) {
    check_axes(axes, g.dim, "gaussian_marginal");
    GaussianSpec out;
    out.dim = static_cast<int>(axes.size());
    if (!g.mean.empty())
        for (int a : axes) out.mean.push_back(g.mean[a]);
    out.cov.assign(axes.size(), std::vector<double>(axes.size(), 0.0));
    for (std::size_t i = 0; i < axes.size(); ++i)
        for (std::size_t j = 0; j < axes.size(); ++j) out.cov[i][j] = g.cov[axes[i]][axes[j]];
    return out;
}

namespace {

// Per-axis sorted distinct support values with atom index maps, plus the
// (n1+1)x(n2+1)x... cumulative weight table. Index j per axis means "the
// first j values included", so strict inequalities drop the corner's own
// value by using the corner index instead of index+1.
struct SupportGrid {
    std::vector<std::vector<mpq_class>> values;
    std::vector<std::vector<double>> values_d;
    std::vector<std::size_t> shape;   // per-axis value counts + 1
    std::vector<mpz_class> prefix;    // flattened cumulative table

    std::size_t offset(const std::vector<std::size_t>& idx) const {
        std::size_t o = 0;
        for (std::size_t a = 0; a < idx.size(); ++a) o = o * shape[a] + idx[a];
        return o;
    }
};

SupportGrid build_grid(const LatticeDistribution& d) {
    SupportGrid grid;
    const int m = d.dim();
    grid.values.resize(m);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (int a = 0; a < m; ++a) grid.values[a].push_back(d.point(i)[a]);
    for (int a = 0; a < m; ++a) {
        auto& v = grid.values[a];
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    grid.values_d.resize(m);
    for (int a = 0; a < m; ++a)
        for (const mpq_class& q : grid.values[a]) grid.values_d[a].push_back(q.get_d());

    grid.shape.resize(m);
    std::size_t cells = 1;
    for (int a = 0; a < m; ++a) {
        grid.shape[a] = grid.values[a].size() + 1;
        cells *= grid.shape[a];
    }
    grid.prefix.assign(cells, mpz_class(0));

    // place atom weights, then accumulate along each axis
    std::vector<std::size_t> idx(m);
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (int a = 0; a < m; ++a) {
            const auto& v = grid.values[a];
            idx[a] = static_cast<std::size_t>(
                         std::lower_bound(v.begin(), v.end(), d.point(i)[a]) - v.begin()) +
                     1;
        }
        grid.prefix[grid.offset(idx)] += d.weight(i);
    }
    for (int a = 0; a < m; ++a) {
        std::vector<std::size_t> it(m, 0);
        while (true) {
            if (it[a] > 0) {
                std::vector<std::size_t> prev = it;
                prev[a] -= 1;
                grid.prefix[grid.offset(it)] += grid.prefix[grid.offset(prev)];
            }
            int b = m - 1;
            while (b >= 0 && ++it[b] == grid.shape[b]) {
                it[b] = 0;
                --b;
            }
            if (b < 0) break;
        }
    }
    return grid;
}

// Sup of |F_d - Phi| over the finite corner grid of d's support with all
// strict/non-strict patterns.
double finite_corner_sup(const LatticeDistribution& d, const GaussianSpec& g, double tol) {
    const int m = d.dim();
    SupportGrid grid = build_grid(d);
    const mpz_class& total = d.total();

    double best = 0.0;
    std::vector<std::size_t> corner(m, 0);  // corner[a] indexes values[a]
    std::vector<double> zd(m);
    std::vector<std::size_t> idx(m);
    while (true) {
        for (int a = 0; a < m; ++a) zd[a] = grid.values_d[a][corner[a]];
        const double phi = gauss_cdf_engine(g, zd, tol);
        // all strict/non-strict patterns: index corner[a] (strict) or corner[a]+1
        for (unsigned pattern = 0; pattern < (1u << m); ++pattern) {
            for (int a = 0; a < m; ++a) idx[a] = corner[a] + ((pattern >> a) & 1u);
            const double fd = exact_ratio(grid.prefix[grid.offset(idx)], total).get_d();
            best = std::max(best, std::fabs(fd - phi));
        }
        int a = m - 1;
        while (a >= 0 && ++corner[a] == grid.values[a].size()) {
            corner[a] = 0;
            --a;
        }
        if (a < 0) break;
    }
    return best;
}

}  // namespace

double kolmogorov_distance(const LatticeDistribution& d, const GaussianSpec& g, double tol) {
    if (d.dim() != g.dim) throw std::invalid_argument("kolmogorov_distance: dimension mismatch");
    if (d.dim() > 3) throw capacity_error("kolmogorov_distance: dimension larger than 3");
    check_gaussian_query(g, static_cast<std::size_t>(g.dim), tol, "kolmogorov_distance");

    // The sup is approached in the limit of large coordinates wherever the
    // lattice support ends but the Gaussian keeps growing, which reduces to
    // the same comparison for every axis subset.
    const int m = d.dim();
    double best = 0.0;
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        std::vector<int> axes;
        for (int a = 0; a < m; ++a)
            if (mask >> a & 1u) axes.push_back(a);
        if (static_cast<int>(axes.size()) == m) {
            best = std::max(best, finite_corner_sup(d, g, tol / 2));
        } else {
            best = std::max(best,
                            finite_corner_sup(marginal(d, axes), gaussian_marginal(g, axes), tol / 2));
        }
    }
    return best;
}

mpq_class kolmogorov_distance(const LatticeDistribution& a, const LatticeDistribution& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("kolmogorov_distance: dimension mismatch");
    if (a.dim() > 3) throw capacity_error("kolmogorov_distance: dimension larger than 3");
    const int m = a.dim();

    // merged per-axis support values; beyond the largest value both CDFs are
    // constant, so finite corners of the union grid attain the sup exactly
    std::vector<std::vector<mpq_class>> values(m);
    for (const LatticeDistribution* d : {&a, &b})
        for (std::size_t i = 0; i < d->size(); ++i)
            for (int ax = 0; ax < m; ++ax) values[ax].push_back(d->point(i)[ax]);
    for (int ax = 0; ax < m; ++ax) {
        std::sort(values[ax].begin(), values[ax].end());
        values[ax].erase(std::unique(values[ax].begin(), values[ax].end()), values[ax].end());
    }

    std::vector<std::size_t> shape(m);
    std::size_t cells = 1;
    for (int ax = 0; ax < m; ++ax) {
        shape[ax] = values[ax].size() + 1;
        cells *= shape[ax];
    }
    auto offset = [&](const std::vector<std::size_t>& idx) {
        std::size_t o = 0;
        for (int ax = 0; ax < m; ++ax) o = o * shape[ax] + idx[ax];
        return o;
    };
    auto build_prefix = [&](const LatticeDistribution& d) {
        std::vector<mpz_class> prefix(cells, mpz_class(0));
        std::vector<std::size_t> idx(m);
        for (std::size_t i = 0; i < d.size(); ++i) {
            for (int ax = 0; ax < m; ++ax) {
                const auto& v = values[ax];
                idx[ax] = static_cast<std::size_t>(
                              std::lower_bound(v.begin(), v.end(), d.point(i)[ax]) - v.begin()) +
                          1;
            }
            prefix[offset(idx)] += d.weight(i);
        }
        for (int ax = 0; ax < m; ++ax) {
            std::vector<std::size_t> it(m, 0);
            while (true) {
                if (it[ax] > 0) {
                    std::vector<std::size_t> prev = it;
                    prev[ax] -= 1;
                    prefix[offset(it)] += prefix[offset(prev)];
                }
                int bx = m - 1;
                while (bx >= 0 && ++it[bx] == shape[bx]) {
                    it[bx] = 0;
                    --bx;
                }
                if (bx < 0) break;
            }
        }
        return prefix;
    };
    const std::vector<mpz_class> pa = build_prefix(a);
    const std::vector<mpz_class> pb = build_prefix(b);

    mpq_class best = 0;
    std::vector<std::size_t> idx(m, 0);
    while (true) {
        mpq_class diff = exact_ratio(pa[offset(idx)], a.total()) -
                         exact_ratio(pb[offset(idx)], b.total());
        if (diff < 0) diff = -diff;
        if (diff > best) best = diff;
        int ax = m - 1;
        while (ax >= 0 && ++idx[ax] == shape[ax]) {
            idx[ax] = 0;
            --ax;
        }
        if (ax < 0) break;
    }
    return best;
}

}
