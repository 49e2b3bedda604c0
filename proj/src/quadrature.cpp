#include "qpow/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace qpow {

namespace {

// Newton iteration on the Legendre polynomial, standard Golub-free approach.
// Accurate to ~1e-15 for the orders used here.
std::pair<std::vector<double>, std::vector<double>> compute_gauss_legendre(int n) {
    std::vector<double> x(n), w(n);
    const double pi = std::numbers::pi;
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            // p0 = P_n(z), derivative from the recurrence
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
    return {std::move(x), std::move(w)};
}

}  // namespace

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
    static std::mutex mtx;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
    return it->second;
}

QuadratureGrid QuadratureGrid::for_box(const std::vector<Panel>& box, int nodes_per_panel,
                                       int panels_per_side) {
    if (box.empty()) throw std::invalid_argument("quadrature: empty box");
    if (box.size() > 3) throw capacity_error("quadrature: dimension larger than 3");
    if (nodes_per_panel < 1 || panels_per_side < 1)
        throw std::invalid_argument("quadrature: node and panel counts must be positive");

    QuadratureGrid grid;
    grid.dim = static_cast<int>(box.size());
    grid.nodes_per_panel = nodes_per_panel;
    grid.axis_panels.resize(box.size());
    for (std::size_t a = 0; a < box.size(); ++a) {
        const Panel& p = box[a];
        if (!(p.lo < p.hi)) throw std::invalid_argument("quadrature: empty axis interval");
        std::vector<Panel> segments;
        if (p.lo < 0.0 && p.hi > 0.0) {
            segments.push_back({p.lo, 0.0});
            segments.push_back({0.0, p.hi});
        } else {
            segments.push_back(p);
        }
        for (const Panel& seg : segments) {
            const double step = (seg.hi - seg.lo) / panels_per_side;
            for (int k = 0; k < panels_per_side; ++k)
                grid.axis_panels[a].push_back({seg.lo + k * step, seg.lo + (k + 1) * step});
        }
    }
    return grid;
}

AxisNodes axis_nodes(const QuadratureGrid& grid, int axis) {
    if (axis < 0 || axis >= grid.dim) throw std::invalid_argument("axis_nodes: axis out of range");
    const auto& [xs, ws] = gauss_legendre(grid.nodes_per_panel);
    AxisNodes out;
    for (const Panel& p : grid.axis_panels[axis]) {
        const double mid = 0.5 * (p.lo + p.hi);
        const double half = 0.5 * (p.hi - p.lo);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            out.x.push_back(mid + half * xs[i]);
            out.w.push_back(half * ws[i]);
        }
    }
    return out;
}

}
