#include "qpow/dissection.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "qpow/errors.hpp"

namespace qpow {

namespace {

void validate_spec(const DissectionSpec& spec) {
    if (spec.classes.empty())
        throw std::invalid_argument("dissection: at least one size class required");
    std::set<int> seen;
    for (const auto& cls : spec.classes) {
        if (cls.empty()) throw std::invalid_argument("dissection: empty size class");
        for (int k : cls) {
            if (k < 3)
                throw std::invalid_argument("dissection: face size " + std::to_string(k) +
                                            " is below 3");
            if (!seen.insert(k).second)
                throw std::invalid_argument("dissection: face size " + std::to_string(k) +
                                            " appears in two classes");
        }
    }
}

}  // namespace

DissectionSpec dissection_spec_from_json(const std::string& text) {
    DissectionSpec spec;
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        for (const auto& cls : j.at("classes")) {
            std::vector<int> sizes;
            for (const auto& k : cls) sizes.push_back(k.get<int>());
            spec.classes.push_back(std::move(sizes));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("dissection spec JSON: ") + e.what());
    }
    validate_spec(spec);
    return spec;
}

MultiSeries<mpq_class> solve_dissection_series(const DissectionSpec& spec, int z_order) {
    validate_spec(spec);
    if (z_order < 1)
        throw std::invalid_argument("solve_dissection_series: order must be >= 1");
    const int t = static_cast<int>(spec.classes.size());
    const int vars = t + 1;
    // A dissection of z-order N has at most N-1 faces, so bounding every
    // variable by N loses nothing.
    const Truncation tr = Truncation::by_variable(std::vector<int>(vars, z_order));
    const MultiSeries<mpq_class> z = MultiSeries<mpq_class>::variable(vars, 0, tr);

    int max_power = 0;
    for (const auto& cls : spec.classes)
        for (int k : cls)
            if (k - 1 <= z_order) max_power = std::max(max_power, k - 1);

    MultiSeries<mpq_class> f = MultiSeries<mpq_class>::constant(vars, mpq_class(0), tr);
    // every pass fixes at least one more z-order, so z_order+1 passes suffice
    for (int pass = 0; pass <= z_order + 1; ++pass) {
        std::vector<MultiSeries<mpq_class>> power;
        power.push_back(MultiSeries<mpq_class>::constant(vars, mpq_class(1), tr));
        for (int p = 1; p <= max_power; ++p) power.push_back(series_mul(power.back(), f));

        MultiSeries<mpq_class> next = z;
        for (int i = 0; i < t; ++i) {
            MultiSeries<mpq_class> cls_sum = MultiSeries<mpq_class>::constant(vars, mpq_class(0), tr);
            for (int k : spec.classes[i])
                if (k - 1 <= z_order) cls_sum = series_add(cls_sum, power[k - 1]);
            next = series_add(
                next, series_mul(MultiSeries<mpq_class>::variable(vars, i + 1, tr), cls_sum));
        }
        if (next == f) return f;
        f = std::move(next);
    }
    throw convergence_error("solve_dissection_series: fixed point did not stabilize");
}

namespace {

int solved_z_order(const MultiSeries<mpq_class>& solved) {
    if (solved.trunc.per_variable && !solved.trunc.per_variable->empty())
        return (*solved.trunc.per_variable)[0];
    if (solved.trunc.total_degree) return *solved.trunc.total_degree;
    return std::numeric_limits<int>::max();
}

}  // namespace

DissectionCounts dissection_counts(const MultiSeries<mpq_class>& solved, int n) {
    if (n < 2) throw std::invalid_argument("dissection_counts: n must be >= 2");
    if (solved.num_vars < 2)
        throw std::invalid_argument("dissection_counts: series must have z and x variables");
    if (n - 1 > solved_z_order(solved))
        throw std::invalid_argument(
            "dissection_counts: series solved to z-order " +
            std::to_string(solved_z_order(solved)) + "; re-solve with order >= " +
            std::to_string(n - 1));
    DissectionCounts counts;
    for (const auto& [e, c] : solved.coeffs) {
        if (e[0] != n - 1) continue;
        mpq_class q = c;
        q.canonicalize();
        if (q.get_den() != 1)
            throw std::logic_error("dissection_counts: non-integer count coefficient");
        counts[std::vector<int>(e.begin() + 1, e.end())] = q.get_num();
    }
    return counts;
}

DissectionCounts dissection_counts(const DissectionSpec& spec, int n) {
    if (n < 2) throw std::invalid_argument("dissection_counts: n must be >= 2");
    return dissection_counts(solve_dissection_series(spec, std::max(n - 1, 1)), n);
}

LatticeDistribution dissection_distribution(const DissectionSpec& spec, int n) {
    const DissectionCounts counts = dissection_counts(spec, n);
    std::vector<std::pair<std::vector<mpq_class>, mpz_class>> atoms;
    for (const auto& [r, w] : counts) {
        if (w == 0) continue;
        std::vector<mpq_class> pt(r.begin(), r.end());
        atoms.emplace_back(std::move(pt), w);
    }
    if (atoms.empty())
        throw std::domain_error("dissection_distribution: the " + std::to_string(n) +
                                "-gon has no dissection with these face sizes");
    return LatticeDistribution(static_cast<int>(spec.classes.size()), std::move(atoms));
}

QuasiPowerFamily dissection_family(const DissectionSpec& spec) {
    validate_spec(spec);
    struct Cache {
        MultiSeries<mpq_class> series;
        int order = 0;
    };
    auto cache = std::make_shared<Cache>();
    QuasiPowerFamily fam;
    fam.name = "dissection";
    fam.dim = static_cast<int>(spec.classes.size());
    fam.generator = [spec, cache](long n) {
        const int order = std::max(static_cast<int>(n) - 1, 1);
        if (cache->order < order) {
            cache->series = solve_dissection_series(spec, order);
            cache->order = order;
        }
        const DissectionCounts counts = dissection_counts(cache->series, static_cast<int>(n));
        std::vector<std::pair<std::vector<mpq_class>, mpz_class>> atoms;
        for (const auto& [r, w] : counts) {
            if (w == 0) continue;
            std::vector<mpq_class> pt(r.begin(), r.end());
            atoms.emplace_back(std::move(pt), w);
        }
        if (atoms.empty())
            throw std::domain_error("dissection_family: the " + std::to_string(n) +
                                    "-gon has no dissection with these face sizes");
        return LatticeDistribution(static_cast<int>(spec.classes.size()), std::move(atoms));
    };
    fam.phi = [](long n) { return static_cast<double>(n); };
    fam.kappa = [](long) { return std::numeric_limits<double>::infinity(); };
    return fam;
}

}
