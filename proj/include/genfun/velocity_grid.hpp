#pragma once

#include <cmath>
#include <vector>

#include "genfun/errors.hpp"
#include "genfun/field.hpp"

namespace genfun {

// Uniform velocity grid on [vmin, vmax]. Derivatives use the fourth-order
// centered five-point stencil with zero ghost values beyond the edges, which
// is accurate for profiles that have decayed at the boundary.
struct VelocityGrid {
    double vmin;
    double vmax;
    int n;
    double dv;
    std::vector<double> nodes;

    VelocityGrid(double vmin_, double vmax_, int n_) : vmin(vmin_), vmax(vmax_), n(n_) {
        if (n < 5) throw GridTooCoarse("velocity grid needs at least 5 points");
        if (!(vmax > vmin)) throw GridMismatch("velocity interval is empty");
        dv = (vmax - vmin) / (n - 1);
        nodes.resize(n);
        for (int j = 0; j < n; ++j) nodes[j] = vmin + j * dv;
    }

    // Pointwise weight <v>^m = (1 + v^2)^(m/2) sampled on the nodes.
    std::vector<double> weight(double m) const {
        std::vector<double> w(n);
        for (int j = 0; j < n; ++j) w[j] = std::pow(1.0 + nodes[j] * nodes[j], 0.5 * m);
        return w;
    }

    std::vector<double> trapezoid_weights() const {
        std::vector<double> w(n, dv);
        w.front() = 0.5 * dv;
        w.back() = 0.5 * dv;
        return w;
    }
};

inline void check_kinetic_layout(const SpectralField& f, const VelocityGrid& grid) {
    if (f.kind() != Transverse::grid_v)
        throw DimensionMismatch("operation needs a grid_v field");
    if (f.nodes() != grid.nodes)
        throw GridMismatch("field nodes do not match the velocity grid");
}

// d/dv along the node axis via the five-point stencil, zero beyond the edges.
inline SpectralField v_derivative(const SpectralField& f, const VelocityGrid& grid) {
    check_kinetic_layout(f, grid);
    SpectralField out(f.dim(), f.trunc(), f.components(), f.kind(), f.nodes());
    out.set_real_valued(f.real_valued());
    const int nn = grid.n;
    const double s = 1.0 / (12.0 * grid.dv);
    f.for_each_mode([&](const Mode&, size_t idx) {
        for (int c = 0; c < f.components(); ++c) {
            const Complex* src = f.mode_ptr(idx, c);
            Complex* dst = out.mode_ptr(idx, c);
            auto val = [&](int j) { return (j < 0 || j >= nn) ? Complex(0.0, 0.0) : src[j]; };
            for (int j = 0; j < nn; ++j)
                dst[j] = s * (val(j - 2) - 8.0 * val(j - 1) + 8.0 * val(j + 1) - val(j + 2));
        }
    });
    return out;
}

// Trapezoid integral over v of pointwise_weight(v) * f, mode by mode; the
// result is a purely periodic field of the same components.
inline SpectralField v_moment(const SpectralField& f, const VelocityGrid& grid,
                              const std::vector<double>& pointwise_weight) {
    check_kinetic_layout(f, grid);
    if (static_cast<int>(pointwise_weight.size()) != grid.n)
        throw GridMismatch("moment weight size does not match grid");
    auto tw = grid.trapezoid_weights();
    SpectralField out(f.dim(), f.trunc(), f.components(), Transverse::none, {});
    out.set_real_valued(f.real_valued());
    f.for_each_mode([&](const Mode&, size_t idx) {
        for (int c = 0; c < f.components(); ++c) {
            const Complex* src = f.mode_ptr(idx, c);
            Complex acc(0.0, 0.0);
            for (int j = 0; j < grid.n; ++j) acc += tw[j] * pointwise_weight[j] * src[j];
            *out.mode_ptr(idx, c) = acc;
        }
    });
    return out;
}

// Pointwise multiplication by the node coordinate v.
inline SpectralField multiply_by_v(const SpectralField& f, const VelocityGrid& grid) {
    check_kinetic_layout(f, grid);
    return scale_nodes(f, grid.nodes);
}

} // namespace genfun
