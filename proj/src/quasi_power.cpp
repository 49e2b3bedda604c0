#include "qpow/quasi_power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

#include "qpow/errors.hpp"

namespace qpow {

namespace {

constexpr std::size_t max_dense_cells = 4'000'000;

// Dense accumulation grid for integer supports; falls back to a map keyed by
// exact coordinates otherwise.
std::optional<LatticeDistribution> convolve_dense(const LatticeDistribution& a,
                                                  const LatticeDistribution& b) {
    const int m = a.dim();
    // ranges of the two supports per axis
    std::vector<long> lo_a(m, 0), hi_a(m, 0), lo_b(m, 0), hi_b(m, 0);
    auto ranges = [&](const LatticeDistribution& d, std::vector<long>& lo_d,
                      std::vector<long>& hi_d) {
        for (std::size_t i = 0; i < d.size(); ++i)
            for (int ax = 0; ax < m; ++ax) {
                const mpq_class& q = d.point(i)[ax];
                if (q.get_den() != 1) return false;
                const mpz_class num = q.get_num();
                if (!num.fits_slong_p()) return false;
                const long v = num.get_si();
                if (i == 0) {
                    lo_d[ax] = hi_d[ax] = v;
                } else {
                    lo_d[ax] = std::min(lo_d[ax], v);
                    hi_d[ax] = std::max(hi_d[ax], v);
                }
            }
        return true;
    };
    if (!ranges(a, lo_a, hi_a) || !ranges(b, lo_b, hi_b)) return std::nullopt;

    std::vector<long> base(m);
    std::vector<std::size_t> extent(m);
    std::size_t cells = 1;
    for (int ax = 0; ax < m; ++ax) {
        base[ax] = lo_a[ax] + lo_b[ax];
        const long span = (hi_a[ax] + hi_b[ax]) - base[ax];
        extent[ax] = static_cast<std::size_t>(span) + 1;
        if (extent[ax] > max_dense_cells / cells) return std::nullopt;
        cells *= extent[ax];
    }

    std::vector<mpz_class> grid(cells, mpz_class(0));
    std::vector<long> coord_a(m);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (int ax = 0; ax < m; ++ax) coord_a[ax] = a.point(i)[ax].get_num().get_si();
        for (std::size_t j = 0; j < b.size(); ++j) {
            std::size_t flat = 0;
            for (int ax = 0; ax < m; ++ax) {
                const long c = coord_a[ax] + b.point(j)[ax].get_num().get_si();
                flat = flat * extent[ax] + static_cast<std::size_t>(c - base[ax]);
            }
            grid[flat] += a.weight(i) * b.weight(j);
        }
    }

    std::vector<std::pair<std::vector<mpq_class>, mpz_class>> atoms;
    std::vector<std::size_t> idx(m, 0);
    for (std::size_t flat = 0; flat < cells; ++flat) {
        if (grid[flat] != 0) {
            std::vector<mpq_class> x(m);
            std::size_t rem = flat;
            for (int ax = m - 1; ax >= 0; --ax) {
                x[ax] = base[ax] + static_cast<long>(rem % extent[ax]);
                rem /= extent[ax];
            }
            atoms.emplace_back(std::move(x), std::move(grid[flat]));
        }
    }
    return LatticeDistribution(m, std::move(atoms));
}

}  // namespace

LatticeDistribution convolve(const LatticeDistribution& a, const LatticeDistribution& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("convolve: dimension mismatch");
    if (auto dense = convolve_dense(a, b)) return std::move(*dense);

    const int m = a.dim();
    std::map<std::vector<mpq_class>, mpz_class> agg;
    std::vector<mpq_class> x(m);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            for (int ax = 0; ax < m; ++ax) x[ax] = a.point(i)[ax] + b.point(j)[ax];
            agg[x] += a.weight(i) * b.weight(j);
        }
    std::vector<std::pair<std::vector<mpq_class>, mpz_class>> atoms;
    atoms.reserve(agg.size());
    for (auto& [pt, w] : agg) atoms.emplace_back(pt, w);
    return LatticeDistribution(m, std::move(atoms));
}

LatticeDistribution convolution_power(const LatticeDistribution& base, long n) {
    if (n < 1) throw std::invalid_argument("convolution_power: n must be >= 1");
    std::optional<LatticeDistribution> acc;
    LatticeDistribution sq = base;
    long e = n;
    while (true) {
        if (e & 1) acc = acc ? convolve(*acc, sq) : sq;
        e >>= 1;
        if (e == 0) break;
        sq = convolve(sq, sq);
    }
    return std::move(*acc);
}

namespace {

mpz_class factorial(int n) {
    mpz_class f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

void enumerate_exponents(int m, int budget, std::vector<int>& e,
                         const std::function<void(const std::vector<int>&)>& fn, int axis = 0) {
    if (axis == m) {
        fn(e);
        return;
    }
    for (int v = 0; v <= budget; ++v) {
        e[axis] = v;
        enumerate_exponents(m, budget - v, e, fn, axis + 1);
    }
    e[axis] = 0;
}

mpq_class submatrix_det(const std::vector<std::vector<mpq_class>>& c, const std::vector<int>& s) {
    switch (s.size()) {
        case 1:
            return c[s[0]][s[0]];
        case 2:
            return c[s[0]][s[0]] * c[s[1]][s[1]] - c[s[0]][s[1]] * c[s[1]][s[0]];
        case 3: {
            const int i = s[0], j = s[1], k = s[2];
            return c[i][i] * (c[j][j] * c[k][k] - c[j][k] * c[k][j]) -
                   c[i][j] * (c[j][i] * c[k][k] - c[j][k] * c[k][i]) +
                   c[i][k] * (c[j][i] * c[k][j] - c[j][j] * c[k][i]);
        }
        default:
            throw capacity_error("submatrix_det: dimension larger than 3");
    }
}

std::vector<int> unit_exponent(int m, int axis, int count = 1) {
    std::vector<int> e(m, 0);
    e[axis] = count;
    return e;
}

}  // namespace

QuasiPowerFamily iid_sum_family(const LatticeDistribution& base, int series_order,
                                const std::string& name) {
    const int m = base.dim();
    if (m > 3) throw capacity_error("iid_sum_family: dimension larger than 3");
    if (series_order < 2) throw std::invalid_argument("iid_sum_family: series order too small");

    const Truncation tr = Truncation::by_total_degree(series_order);
    MultiSeries<mpq_class> mgf = MultiSeries<mpq_class>::constant(m, mpq_class(0), tr);
    std::vector<int> e(m, 0);
    enumerate_exponents(m, series_order, e, [&](const std::vector<int>& exp) {
        mpq_class coeff = moments(base, exp);
        for (int x : exp) coeff /= mpq_class(factorial(x));
        if (coeff != 0) mgf.set(exp, coeff);
    });

    AnalyticData data{series_log(mgf), MultiSeries<mpq_class>::constant(m, mpq_class(0), tr),
                      {}, {}};
    data.grad_u0.resize(m);
    data.hess_u0.assign(m, std::vector<mpq_class>(m));
    for (int i = 0; i < m; ++i) {
        data.grad_u0[i] = data.u.coefficient(unit_exponent(m, i));
        for (int j = 0; j < m; ++j) {
            if (i == j)
                data.hess_u0[i][j] = 2 * data.u.coefficient(unit_exponent(m, i, 2));
            else {
                auto ee = unit_exponent(m, i);
                ee[j] = 1;
                data.hess_u0[i][j] = data.u.coefficient(ee);
            }
        }
    }

    QuasiPowerFamily fam;
    fam.name = name;
    fam.dim = m;
    fam.generator = [base](long n) { return convolution_power(base, n); };
    fam.phi = [](long n) { return static_cast<double>(n); };
    fam.kappa = [](long) { return std::numeric_limits<double>::infinity(); };
    fam.analytic = std::move(data);
    return fam;
}

StandardizedPair standardized_distribution(const QuasiPowerFamily& fam, long n,
                                           StandardizeMode mode) {
    if (n < 1) throw std::invalid_argument("standardized_distribution: n must be >= 1");
    LatticeDistribution d = fam.generator(n);
    const int m = d.dim();
    const double phi = fam.phi(n);
    if (!(phi > 0)) throw std::invalid_argument("standardized_distribution: phi_n must be positive");
    const double scale = std::sqrt(phi);

    if (mode == StandardizeMode::Analytic) {
        if (!fam.analytic)
            throw std::invalid_argument(
                "standardized_distribution: family has no closed-form cumulant data");
        const AnalyticData& a = *fam.analytic;
        GaussianSpec g;
        g.dim = m;
        g.mean.assign(m, 0.0);
        g.cov.assign(m, std::vector<double>(m, 0.0));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) g.cov[i][j] = a.hess_u0[i][j].get_d();
        if (!g.non_degenerate())
            throw std::domain_error(
                "standardized_distribution: singular limit covariance; this family belongs in "
                "the degenerate demo, not a normal-limit study");
        std::vector<mpq_class> center(m);
        for (int i = 0; i < m; ++i) center[i] = a.grad_u0[i] * mpq_class(phi);
        std::vector<int> kept(m);
        for (int i = 0; i < m; ++i) kept[i] = i;
        return StandardizedPair{standardize(d, center, scale), std::move(g), std::move(kept)};
    }

    // exact-moments mode
    std::vector<mpq_class> mean(m);
    for (int i = 0; i < m; ++i) mean[i] = moments(d, unit_exponent(m, i));
    std::vector<std::vector<mpq_class>> cov(m, std::vector<mpq_class>(m));
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            auto ee = unit_exponent(m, i);
            ee[j] += 1;
            cov[i][j] = moments(d, ee) - mean[i] * mean[j];
            cov[j][i] = cov[i][j];
        }

    // greedy maximal axis subset with exactly non-singular covariance
    std::vector<int> kept;
    for (int a = 0; a < m; ++a) {
        std::vector<int> trial = kept;
        trial.push_back(a);
        if (submatrix_det(cov, trial) > 0) kept = std::move(trial);
    }
    if (kept.empty())
        throw std::domain_error(
            "standardized_distribution: exact covariance is fully degenerate; this family "
            "belongs in the degenerate demo, not a normal-limit study");

    if (static_cast<int>(kept.size()) < m) d = marginal(d, kept);
    std::vector<mpq_class> center;
    center.reserve(kept.size());
    for (int a : kept) center.push_back(mean[a]);

    GaussianSpec g;
    g.dim = static_cast<int>(kept.size());
    g.mean.assign(kept.size(), 0.0);
    g.cov.assign(kept.size(), std::vector<double>(kept.size(), 0.0));
    const mpq_class phi_q(phi);
    for (std::size_t i = 0; i < kept.size(); ++i)
        for (std::size_t j = 0; j < kept.size(); ++j)
            g.cov[i][j] = mpq_class(cov[kept[i]][kept[j]] / phi_q).get_d();

    return StandardizedPair{standardize(d, center, scale), std::move(g), std::move(kept)};
}

std::vector<ConvergenceRow> convergence_study(const QuasiPowerFamily& fam,
                                              const std::vector<long>& n_list,
                                              StandardizeMode mode, double tol) {
    if (n_list.empty()) throw std::invalid_argument("convergence_study: empty n list");
    std::vector<long> ns = n_list;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

    std::vector<ConvergenceRow> rows;
    rows.reserve(ns.size());
    for (long n : ns) {
        const StandardizedPair sp = standardized_distribution(fam, n, mode);
        ConvergenceRow row;
        row.n = n;
        row.phi_n = fam.phi(n);
        row.distance = kolmogorov_distance(sp.dist, sp.gaussian, tol);
        row.normalized = row.distance * std::sqrt(row.phi_n);
        rows.push_back(row);
    }
    return rows;
}

std::vector<MomentRow> moment_check(const QuasiPowerFamily& fam, const std::vector<int>& k,
                                    const std::vector<long>& n_list) {
    if (!fam.analytic)
        throw std::invalid_argument("moment_check: family has no closed-form cumulant data");
    if (static_cast<int>(k.size()) != fam.dim)
        throw std::invalid_argument("moment_check: exponent length mismatch");
    const MomentPolynomial<mpq_class> mp = moment_polynomials(fam.analytic->u, fam.analytic->v, k);

    mpq_class kfact = 1;
    for (int x : k) kfact *= mpq_class(factorial(x));

    std::vector<MomentRow> rows;
    rows.reserve(n_list.size());
    for (long n : n_list) {
        const LatticeDistribution d = fam.generator(n);
        MomentRow row;
        row.n = n;
        row.lhs = moments(d, k) / kfact;
        row.rhs = mp.poly.eval(mpq_class(fam.phi(n)));
        row.abs_error = abs(row.lhs - row.rhs);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<DegenerateRow> degenerate_demo(const std::vector<long>& n_list) {
    std::vector<DegenerateRow> rows;
    rows.reserve(n_list.size());
    for (long n : n_list) {
        if (n < 1) throw std::invalid_argument("degenerate_demo: n must be >= 1");
        const mpq_class a(1.0 / std::sqrt(static_cast<double>(n)));
        LatticeDistribution scaled(1, {{{-a}, 1}, {{a}, 1}});
        LatticeDistribution limit(1, {{{mpq_class(0)}, 1}});
        rows.push_back(DegenerateRow{n, kolmogorov_distance(scaled, limit)});
    }
    return rows;
}

}
