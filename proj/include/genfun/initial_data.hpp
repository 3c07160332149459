#pragma once

#include <cmath>
#include <vector>

#include "genfun/errors.hpp"
#include "genfun/field.hpp"
#include "genfun/leray.hpp"
#include "genfun/util.hpp"
#include "genfun/velocity_grid.hpp"

namespace genfun {

// u(x) = a sin(x): modes +-1 with coefficients -+ a/(2i).
inline SpectralField preset_sine(int N, double amplitude = 1.0) {
    SpectralField u(1, N);
    u.at(Mode{1, 0}) = Complex(0.0, -0.5 * amplitude);
    u.at(Mode{-1, 0}) = Complex(0.0, 0.5 * amplitude);
    u.set_real_valued(true);
    return u;
}

// Stationary cellular velocity field u = a (sin x cos y, -cos x sin y);
// divergence free mode by mode.
inline SpectralField preset_taylor_green(int N, double amplitude = 1.0) {
    SpectralField u(2, N, 2);
    const Complex q(0.0, -0.25 * amplitude); // a / (4 i)
    u.at(Mode{1, 1}, 0) = q;
    u.at(Mode{1, -1}, 0) = q;
    u.at(Mode{-1, 1}, 0) = -q;
    u.at(Mode{-1, -1}, 0) = -q;
    u.at(Mode{1, 1}, 1) = -q;
    u.at(Mode{1, -1}, 1) = q;
    u.at(Mode{-1, 1}, 1) = -q;
    u.at(Mode{-1, -1}, 1) = q;
    u.set_real_valued(true);
    return u;
}

// x-independent channel profile omega(y) = a cos(pi y / 2).
inline SpectralField preset_shear(int N, const std::vector<double>& nodes,
                                  double amplitude = 1.0) {
    SpectralField w(1, N, 1, Transverse::chebyshev_y, nodes);
    for (size_t j = 0; j < nodes.size(); ++j)
        w.at(Mode{0, 0}, 0, static_cast<int>(j)) =
            Complex(amplitude * std::cos(0.5 * M_PI * nodes[j]), 0.0);
    w.set_real_valued(true);
    return w;
}

// Gaussian velocity background with unit mass on the real line.
inline double maxwellian(double v) { return std::exp(-v * v) / std::sqrt(M_PI); }

// f = g(v) (1 + eps cos x): spatially uniform background plus a small wave.
inline SpectralField preset_perturbed_maxwellian(int N, const VelocityGrid& grid,
                                                 double eps) {
    SpectralField f(1, N, 1, Transverse::grid_v, grid.nodes);
    for (int j = 0; j < grid.n; ++j) {
        const double g = maxwellian(grid.nodes[j]);
        f.at(Mode{0, 0}, 0, j) = Complex(g, 0.0);
        f.at(Mode{1, 0}, 0, j) = Complex(0.5 * eps * g, 0.0);
        f.at(Mode{-1, 0}, 0, j) = Complex(0.5 * eps * g, 0.0);
    }
    f.set_real_valued(true);
    return f;
}

// Random real-valued scalar with coefficient scale amp * e^{-decay |alpha|_2},
// restricted to the Euclidean ball of radius N.
inline SpectralField random_scalar(int dim, int N, double amp, double decay, Rng& rng) {
    SpectralField f(dim, N);
    f.for_each_mode([&](const Mode& m, size_t idx) {
        const double scale = amp * std::exp(-decay * mode_l2(m)) / std::sqrt(2.0);
        *f.mode_ptr(idx, 0) = Complex(scale * rng.normal(), scale * rng.normal());
    });
    return truncate(hermitian_symmetrize(f), N);
}

// Random real-valued divergence-free velocity field on the 2-torus.
inline SpectralField random_divfree(int N, double amp, double decay, Rng& rng) {
    std::vector<SpectralField> comps;
    comps.push_back(random_scalar(2, N, amp, decay, rng));
    comps.push_back(random_scalar(2, N, amp, decay, rng));
    SpectralField u = leray_project(stack_fields(comps));
    u.set_real_valued(true);
    return u;
}

// Random channel data: per x-mode, a short cosine-polynomial profile in y with
// geometrically damped degrees, conjugate-symmetrized across modes.
inline SpectralField random_channel(int N, const std::vector<double>& nodes, double amp,
                                    double decay, Rng& rng, int degrees = 5) {
    SpectralField w(1, N, 1, Transverse::chebyshev_y, nodes);
    const int nn = static_cast<int>(nodes.size());
    w.for_each_mode([&](const Mode& m, size_t idx) {
        const double scale = amp * std::exp(-decay * mode_l2(m));
        std::vector<Complex> ck(degrees);
        for (int k = 0; k < degrees; ++k)
            ck[k] = scale * std::exp(-0.8 * k) *
                    Complex(rng.normal(), rng.normal()) / std::sqrt(2.0);
        Complex* dst = w.mode_ptr(idx, 0);
        for (int j = 0; j < nn; ++j) {
            Complex acc(0.0, 0.0);
            const double th = std::acos(std::min(1.0, std::max(-1.0, nodes[j])));
            for (int k = 0; k < degrees; ++k) acc += ck[k] * std::cos(k * th);
            dst[j] = acc;
        }
    });
    return truncate(hermitian_symmetrize(w), N);
}

// Random phase-space data: Gaussian velocity profiles with damped x-modes.
inline SpectralField random_kinetic(int N, const VelocityGrid& grid, double amp,
                                    double decay, Rng& rng) {
    SpectralField f(1, N, 1, Transverse::grid_v, grid.nodes);
    f.for_each_mode([&](const Mode& m, size_t idx) {
        const double scale = amp * std::exp(-decay * mode_l2(m));
        const Complex c = scale * Complex(rng.normal(), rng.normal()) / std::sqrt(2.0);
        Complex* dst = f.mode_ptr(idx, 0);
        for (int j = 0; j < grid.n; ++j) dst[j] = c * maxwellian(grid.nodes[j]);
    });
    return truncate(hermitian_symmetrize(f), N);
}

} // namespace genfun
