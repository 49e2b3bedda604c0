#pragma once

#include <type_traits>
#include <utility>
#include <vector>

#include "qpow/errors.hpp"
#include "qpow/scalar.hpp"

// Deterministic tensor-product Gauss-Legendre integration over axis-aligned
// boxes in up to 3 dimensions. Axes that straddle 0 are split into panels at 0
// so that no node ever has a zero coordinate (Gauss nodes are interior), which
// keeps integrands with removable singularities on the hyperplanes safe
// without special-case code.

namespace qpow {

struct Panel {
    double lo;
    double hi;
};

// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order);

struct QuadratureGrid {
    int dim = 0;
    int nodes_per_panel = 0;
    std::vector<std::vector<Panel>> axis_panels;

    // Split each axis at 0 when it straddles 0, then cut every resulting
    // segment into panels_per_side equal panels.
    static QuadratureGrid for_box(const std::vector<Panel>& box, int nodes_per_panel = 24,
                                  int panels_per_side = 2);
};

// All nodes and weights of one axis of the grid, flattened across its panels.
struct AxisNodes {
    std::vector<double> x;
    std::vector<double> w;
};
AxisNodes axis_nodes(const QuadratureGrid& grid, int axis);

// Tensor-product estimate; exact for per-axis polynomials of degree
// <= 2*nodes_per_panel - 1. Summation order is fixed, so results are
// reproducible bit for bit.
template <class F>
auto integrate_box(F&& f, const QuadratureGrid& grid) {
    using T = std::invoke_result_t<F&, const std::vector<double>&>;
    std::vector<AxisNodes> axes;
    axes.reserve(grid.dim);
    for (int a = 0; a < grid.dim; ++a) axes.push_back(axis_nodes(grid, a));

    T acc(0);
    std::vector<double> pt(grid.dim);
    std::vector<std::size_t> idx(grid.dim, 0);
    while (true) {
        double wprod = 1.0;
        for (int a = 0; a < grid.dim; ++a) {
            pt[a] = axes[a].x[idx[a]];
            wprod *= axes[a].w[idx[a]];
        }
        acc += f(pt) * wprod;
        int a = grid.dim - 1;
        while (a >= 0 && ++idx[a] == axes[a].x.size()) {
            idx[a] = 0;
            --a;
        }
        if (a < 0) break;
    }
    return acc;
}

template <class F>
auto integrate_box(F&& f, const std::vector<Panel>& box, int nodes_per_panel = 24,
                   int panels_per_side = 2) {
    return integrate_box(f, QuadratureGrid::for_box(box, nodes_per_panel, panels_per_side));
}

struct RefineOptions {
    double rel_tol = 1e-6;
    // Convergence test: |delta| <= max(rel_tol * |value|, abs_floor). The
    // absolute floor keeps integrands that vanish up to rounding noise from
    // being flagged as non-convergent.
    double abs_floor = 1e-12;
    int max_level = 5;
    int initial_nodes_per_panel = 16;
    int panels_per_side = 2;
};

template <class T>
struct RefineResult {
    T value{};
    double error_estimate = 0;  // magnitude of the last refinement delta
    bool converged = false;
    int levels_used = 0;  // number of node-doubling steps performed
    int final_nodes_per_panel = 0;
};

// Double nodes per panel until two successive estimates agree, or give back
// the last estimate flagged as not converged. Never silently accepts.
template <class F>
auto refine_until(F&& f, const std::vector<Panel>& box, const RefineOptions& opt = {}) {
    using T = std::invoke_result_t<F&, const std::vector<double>&>;
    if (opt.rel_tol <= 0) throw std::invalid_argument("refine_until: rel_tol must be positive");
    RefineResult<T> res;
    int npp = opt.initial_nodes_per_panel;
    T prev = integrate_box(f, box, npp, opt.panels_per_side);
    for (int level = 1; level <= opt.max_level; ++level) {
        npp *= 2;
        T next = integrate_box(f, box, npp, opt.panels_per_side);
        const double delta = magnitude(next - prev);
        res.value = next;
        res.error_estimate = delta;
        res.levels_used = level;
        res.final_nodes_per_panel = npp;
        if (delta <= std::max(opt.rel_tol * magnitude(next), opt.abs_floor)) {
            res.converged = true;
            return res;
        }
        prev = next;
    }
    return res;
}

}
