#pragma once

#include <cmath>

#include "genfun/errors.hpp"
#include "genfun/field.hpp"

namespace genfun {

// Largest |alpha . u_alpha| over the box; zero iff the field is divergence free.
inline double divergence_residual(const SpectralField& u) {
    if (u.dim() != 2 || u.components() != 2)
        throw DimensionMismatch("divergence is defined for 2-d two-component fields");
    double worst = 0.0;
    u.for_each_mode([&](const Mode& m, size_t idx) {
        const Complex d = static_cast<double>(m[0]) * *u.mode_ptr(idx, 0) +
                          static_cast<double>(m[1]) * *u.mode_ptr(idx, 1);
        worst = std::max(worst, std::abs(d));
    });
    return worst;
}

// Mode-wise orthogonal projection onto divergence-free fields:
// u_alpha -> u_alpha - alpha (alpha . u_alpha) / |alpha|^2, identity on alpha = 0.
inline SpectralField leray_project(const SpectralField& u) {
    if (u.dim() != 2 || u.components() != 2)
        throw DimensionMismatch("projection is defined for 2-d two-component fields");
    if (u.kind() != Transverse::none)
        throw DimensionMismatch("projection is defined for purely periodic fields");
    SpectralField out(u.dim(), u.trunc(), 2, u.kind(), u.nodes());
    out.set_real_valued(u.real_valued());
    u.for_each_mode([&](const Mode& m, size_t idx) {
        const Complex u0 = *u.mode_ptr(idx, 0);
        const Complex u1 = *u.mode_ptr(idx, 1);
        const double a0 = m[0], a1 = m[1];
        const double n2 = a0 * a0 + a1 * a1;
        if (n2 == 0.0) {
            *out.mode_ptr(idx, 0) = u0;
            *out.mode_ptr(idx, 1) = u1;
            return;
        }
        const Complex dot = (a0 * u0 + a1 * u1) / n2;
        *out.mode_ptr(idx, 0) = u0 - a0 * dot;
        *out.mode_ptr(idx, 1) = u1 - a1 * dot;
    });
    return out;
}

} // namespace genfun
