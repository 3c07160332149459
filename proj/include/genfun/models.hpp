#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "genfun/chebyshev.hpp"
#include "genfun/errors.hpp"
#include "genfun/field.hpp"
#include "genfun/generator.hpp"
#include "genfun/initial_data.hpp"
#include "genfun/leray.hpp"
#include "genfun/majorant.hpp"
#include "genfun/util.hpp"
#include "genfun/velocity_grid.hpp"

namespace genfun {

inline constexpr double kBlowupGuard = 1e12;

// Everything the driver needs to evolve and measure one evolution equation:
// the truncated right side, the declared scalar bound on the weighted sum of
// the right side, the curve variant for measuring states, and a source of
// layout-appropriate random states for empirical certification.
struct ModelSpec {
    std::string name;
    double C0 = 1.0;
    MajorantSeries F = MajorantSeries::identity();
    // True when the scalar continuation argument applies verbatim with (C0, F);
    // otherwise the driver falls back to the empirically integrated bound.
    bool framework_certified = false;
    GeneratorVariant variant = GeneratorVariant::fourier;
    int primary_components = 1;
    bool augmented = false;

    std::function<SpectralField(const SpectralField&, int)> rhs;
    // Declared bound on the weighted sum of the right side, as a function of
    // the state's curve value G and slope dG at the same z.
    std::function<double(double, double)> condition_rhs;
    std::function<GeneratorCurve(const SpectralField&, const std::vector<double>&)> measure;
    std::function<GeneratorCurve(const SpectralField&, const std::vector<double>&)> measure_dz;
    std::function<SpectralField(int, Rng&)> random_state;
    // Augmented models: maps the primary block to the trailing derivative
    // components, used both by the right side and the consistency check.
    std::function<std::vector<SpectralField>(const SpectralField&)> lift_derivatives;
};

// u_t = -u u_x on the torus, measured with the plain Fourier weighting.
// The weighted sum of u u_x is at most G(z) G'(z).
inline ModelSpec burgers_model() {
    ModelSpec m;
    m.name = "burgers";
    m.C0 = 1.0;
    m.F = MajorantSeries::identity();
    m.framework_certified = true;
    m.variant = GeneratorVariant::fourier;
    m.rhs = [](const SpectralField& u, int Nout) {
        return scaled(convolve(u, derivative(u, 0), Nout), -1.0);
    };
    const double C0 = m.C0;
    const MajorantSeries F = m.F;
    m.condition_rhs = [C0, F](double G, double dG) {
        return C0 * majorant_value(F, G) * dG;
    };
    m.measure = [](const SpectralField& u, const std::vector<double>& zg) {
        return gen_fourier(u, zg);
    };
    m.measure_dz = [](const SpectralField& u, const std::vector<double>& zg) {
        return gen_fourier_dz(u, zg);
    };
    m.random_state = [](int N, Rng& rng) { return random_scalar(1, N, 1.0, 0.5, rng); };
    return m;
}

// Incompressible velocity dynamics on the 2-torus: u_t = -P(u . grad u) with
// the mode-wise orthogonal projection P. The projection contracts each mode,
// so the weighted sum of the right side is bounded by G G'; C0 = 2 is the
// declared constant, leaving margin over the measured ratio.
inline ModelSpec euler_model() {
    ModelSpec m;
    m.name = "euler";
    m.C0 = 2.0;
    m.F = MajorantSeries::identity();
    m.framework_certified = true;
    m.variant = GeneratorVariant::fourier;
    m.primary_components = 2;
    m.rhs = [](const SpectralField& u, int Nout) {
        if (divergence_residual(u) > 1e-10)
            throw NotDivergenceFree("velocity input has divergence residual " +
                                    fmt17(divergence_residual(u)));
        const SpectralField u0 = extract_component(u, 0);
        const SpectralField u1 = extract_component(u, 1);
        std::vector<SpectralField> adv;
        for (int j = 0; j < 2; ++j) {
            const SpectralField uj = j == 0 ? u0 : u1;
            SpectralField w = convolve(u0, derivative(uj, 0), Nout);
            w.add_scaled(convolve(u1, derivative(uj, 1), Nout), 1.0);
            adv.push_back(std::move(w));
        }
        return scaled(leray_project(stack_fields(adv)), -1.0);
    };
    const double C0 = m.C0;
    const MajorantSeries F = m.F;
    m.condition_rhs = [C0, F](double G, double dG) {
        return C0 * majorant_value(F, G) * dG;
    };
    m.measure = [](const SpectralField& u, const std::vector<double>& zg) {
        return gen_fourier(u, zg);
    };
    m.measure_dz = [](const SpectralField& u, const std::vector<double>& zg) {
        return gen_fourier_dz(u, zg);
    };
    m.random_state = [](int N, Rng& rng) { return random_divfree(N, 1.0, 0.5, rng); };
    return m;
}

// Vorticity transport in a periodic channel: omega_t + u . grad omega = 0,
// where the stream function solves phi_yy = omega per x-mode with wall values
// zero and u = (phi_y, -phi_x). C0 is assembled from the operator norms of the
// wall-value solve, so the declared bound C0 (G + G') G' holds empirically.
inline ModelSpec hydrostatic_model(int n_nodes, double rho, int taylor_cap = 8,
                                   bool augmented = false) {
    auto grid = std::make_shared<ChebyshevGrid>(n_nodes);
    const int n = grid->size();
    const std::vector<double>& S = grid->dirichlet_solve();
    const std::vector<double> DS = matmul(grid->diff(), S, n);

    ModelSpec m;
    m.name = "hydrostatic";
    m.C0 = std::max({1.0, norm_inf(S, n), norm_inf(DS, n)}) + std::max(1.0, rho);
    m.F = MajorantSeries::identity();
    m.framework_certified = false;
    m.variant = GeneratorVariant::mixed;
    m.augmented = augmented;

    auto core_rhs = [grid](const SpectralField& w, int Nout) {
        const SpectralField phi = poisson_channel_solve(w, *grid);
        const SpectralField ux = apply_node_matrix(phi, grid->diff());
        const SpectralField uy = scaled(derivative(phi, 0), -1.0);
        SpectralField adv = convolve(ux, derivative(w, 0), Nout);
        adv.add_scaled(convolve(uy, apply_node_matrix(w, grid->diff()), Nout), 1.0);
        return scaled(adv, -1.0);
    };
    m.lift_derivatives = [grid](const SpectralField& s) {
        return std::vector<SpectralField>{derivative(s, 0), apply_node_matrix(s, grid->diff())};
    };
    if (!augmented) {
        m.rhs = [core_rhs](const SpectralField& w, int Nout) { return core_rhs(w, Nout); };
    } else {
        auto lift = m.lift_derivatives;
        m.rhs = [core_rhs, lift](const SpectralField& w, int Nout) {
            SpectralField r0 = core_rhs(extract_component(w, 0), Nout);
            std::vector<SpectralField> parts = lift(r0);
            parts.insert(parts.begin(), std::move(r0));
            return stack_fields(parts);
        };
    }
    const double C0 = m.C0;
    m.condition_rhs = [C0](double G, double dG) { return C0 * (G + dG) * dG; };
    const int B = taylor_cap;
    m.measure = [B, aug = augmented](const SpectralField& w, const std::vector<double>& zg) {
        return gen_mixed(aug ? extract_component(w, 0) : w, zg, B);
    };
    m.measure_dz = [B, aug = augmented](const SpectralField& w,
                                        const std::vector<double>& zg) {
        return gen_mixed_dz(aug ? extract_component(w, 0) : w, zg, B);
    };
    auto nodes = grid->nodes();
    m.random_state = [nodes, aug = augmented,
                      lift = m.lift_derivatives](int N, Rng& rng) {
        SpectralField w = random_channel(N, nodes, 0.3, 0.7, rng);
        if (!aug) return w;
        std::vector<SpectralField> parts = lift(w);
        parts.insert(parts.begin(), std::move(w));
        return stack_fields(parts);
    };
    return m;
}

enum class PotentialLaw { density, second_moment };

// Collisionless phase-space transport f_t + v f_x + E(x) f_v = 0 on one
// spatial dimension. The self-consistent potential is algebraic in the
// density coefficients: either phi_k = rho_k - delta_{k0} (density law) or
// phi_k = -integral of v^2 f_k for k != 0 (second-moment law); E = -phi_x.
// The weighted sum of the right side is bounded by C0 (G')^2.
inline ModelSpec kinetic_model(const VelocityGrid& grid, PotentialLaw law,
                               int taylor_cap = 6, double weight_m = 4.0,
                               bool augmented = false) {
    auto vg = std::make_shared<VelocityGrid>(grid);

    ModelSpec m;
    m.name = law == PotentialLaw::density ? "vdb" : "kie";
    m.C0 = 2.0;
    m.F = MajorantSeries::identity();
    m.framework_certified = false;
    m.variant = GeneratorVariant::kinetic;
    m.augmented = augmented;

    auto potential = [vg, law](const SpectralField& f) {
        std::vector<double> w(vg->n, 1.0);
        if (law == PotentialLaw::second_moment)
            for (int j = 0; j < vg->n; ++j) w[j] = -vg->nodes[j] * vg->nodes[j];
        SpectralField phi = v_moment(f, *vg, w);
        if (law == PotentialLaw::density)
            phi.at(Mode{0, 0}) -= Complex(1.0, 0.0);
        else
            phi.at(Mode{0, 0}) = Complex(0.0, 0.0);
        return phi;
    };
    auto core_rhs = [vg, potential](const SpectralField& f, int Nout) {
        SpectralField streaming =
            scaled(derivative(multiply_by_v(f, *vg), 0), -1.0);
        const SpectralField phi = potential(f);
        const SpectralField force =
            convolve_broadcast(derivative(phi, 0), v_derivative(f, *vg), Nout);
        return add_fields(truncate(streaming, Nout), force);
    };
    m.lift_derivatives = [vg](const SpectralField& s) {
        return std::vector<SpectralField>{derivative(s, 0), v_derivative(s, *vg)};
    };
    if (!augmented) {
        m.rhs = [core_rhs](const SpectralField& f, int Nout) { return core_rhs(f, Nout); };
    } else {
        auto lift = m.lift_derivatives;
        m.rhs = [core_rhs, lift](const SpectralField& f, int Nout) {
            SpectralField r0 = core_rhs(extract_component(f, 0), Nout);
            std::vector<SpectralField> parts = lift(r0);
            parts.insert(parts.begin(), std::move(r0));
            return stack_fields(parts);
        };
    }
    const double C0 = m.C0;
    m.condition_rhs = [C0](double, double dG) { return C0 * dG * dG; };
    const int B = taylor_cap;
    const double mm = weight_m;
    m.measure = [B, mm, vg, aug = augmented](const SpectralField& f,
                                             const std::vector<double>& zg) {
        return gen_kinetic(aug ? extract_component(f, 0) : f, zg, B, mm, *vg);
    };
    m.measure_dz = [B, mm, vg, aug = augmented](const SpectralField& f,
                                                const std::vector<double>& zg) {
        return gen_kinetic_dz(aug ? extract_component(f, 0) : f, zg, B, mm, *vg);
    };
    m.random_state = [vg, aug = augmented, lift = m.lift_derivatives](int N, Rng& rng) {
        SpectralField f = random_kinetic(N, *vg, 0.5, 0.7, rng);
        if (!aug) return f;
        std::vector<SpectralField> parts = lift(f);
        parts.insert(parts.begin(), std::move(f));
        return stack_fields(parts);
    };
    return m;
}

// One classical fourth-order step of the truncated dynamics. Stage values and
// stage outputs both live in the Euclidean mode ball of radius N.
inline SpectralField galerkin_step(const ModelSpec& model, const SpectralField& u,
                                   double dt, int N) {
    auto stage = [&](const SpectralField& v) { return truncate(model.rhs(v, N), N); };
    const SpectralField k1 = stage(u);
    SpectralField v2 = u;
    v2.add_scaled(k1, 0.5 * dt);
    const SpectralField k2 = stage(v2);
    SpectralField v3 = u;
    v3.add_scaled(k2, 0.5 * dt);
    const SpectralField k3 = stage(v3);
    SpectralField v4 = u;
    v4.add_scaled(k3, dt);
    const SpectralField k4 = stage(v4);
    SpectralField out = u;
    out.add_scaled(k1, dt / 6.0);
    out.add_scaled(k2, dt / 3.0);
    out.add_scaled(k3, dt / 3.0);
    out.add_scaled(k4, dt / 6.0);
    if (out.max_abs() > kBlowupGuard)
        throw BlowupDetected("coefficient magnitude " + fmt17(out.max_abs()) +
                             " exceeds the overflow guard");
    return out;
}

struct Diagnostics {
    double t = 0.0;
    double energy = 0.0;
    double mass = 0.0;
    double radius_hat = std::numeric_limits<double>::quiet_NaN();
    double max_tail_coeff = 0.0;
};

// Sum of squared coefficient magnitudes (node-averaged on transverse fields).
inline double field_energy(const SpectralField& f) {
    double e = 0.0;
    for (const Complex& c : f.raw()) e += std::norm(c);
    return e / f.node_count();
}

// Mean-mode content: the zero-mode coefficient, integrated over v for
// phase-space fields and node-averaged in the channel.
inline double field_mass(const SpectralField& f) {
    const size_t idx = f.mode_index(Mode{0, 0});
    if (f.kind() == Transverse::grid_v) {
        const auto& nodes = f.nodes();
        VelocityGrid g(nodes.front(), nodes.back(), static_cast<int>(nodes.size()));
        auto tw = g.trapezoid_weights();
        double acc = 0.0;
        for (int j = 0; j < g.n; ++j) acc += tw[j] * f.mode_ptr(idx, 0)[j].real();
        return acc;
    }
    double acc = 0.0;
    for (int j = 0; j < f.node_count(); ++j) acc += f.mode_ptr(idx, 0)[j].real();
    return acc / f.node_count();
}

inline double max_tail_coeff(const SpectralField& f, int N) {
    double worst = 0.0;
    const int nn = f.node_count();
    f.for_each_mode([&](const Mode& m, size_t idx) {
        if (mode_l2(m) <= static_cast<double>(N) - 1.0) return;
        for (int j = 0; j < nn; ++j)
            worst = std::max(worst, detail::comp_norm(f, idx, j));
    });
    return worst;
}

struct SimParams {
    int N = 16;
    double dt = 1e-3;
    double T = 0.1;
    std::vector<double> zgrid;
    int measure_every = 1;
    bool store_states = false;
    bool measure_slope = false;
};

struct SimulationRecord {
    std::vector<double> times;
    std::vector<GeneratorCurve> curves;
    std::vector<GeneratorCurve> dz_curves; // filled when slope measuring is on
    std::vector<Diagnostics> diagnostics;
    std::vector<SpectralField> states; // written only when requested
    SpectralField final_state{1, 0};
    bool blew_up = false;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
    double consistency_max = 0.0;
};

// Evolves the truncated dynamics with fixed steps, measuring the state's curve
// and diagnostics at step 0 and every measure_every-th step thereafter.
// Augmented states are checked at each sample: trailing components must agree
// with the lifted derivatives of the primary block to near roundoff.
inline SimulationRecord simulate(const ModelSpec& model, const SpectralField& u0,
                                 const SimParams& params) {
    if (params.dt <= 0.0) throw ConfigError("time step must be positive");
    if (params.T < 0.0) throw ConfigError("horizon must be nonnegative");
    if (params.measure_every < 1) throw ConfigError("measure_every must be at least 1");
    validate_zgrid(params.zgrid);

    SimulationRecord rec;
    SpectralField u = truncate(u0, params.N);
    const long nsteps = static_cast<long>(std::floor(params.T / params.dt + 1e-12));

    auto sample = [&](double t) {
        rec.times.push_back(t);
        rec.curves.push_back(model.measure(u, params.zgrid));
        if (params.measure_slope) rec.dz_curves.push_back(model.measure_dz(u, params.zgrid));
        Diagnostics d;
        d.t = t;
        d.energy = field_energy(u);
        d.mass = field_mass(u);
        d.max_tail_coeff = max_tail_coeff(u, params.N);
        try {
            d.radius_hat = radius_estimate(u).rho_hat;
        } catch (const TooFewModes&) {
        }
        rec.diagnostics.push_back(d);
        if (params.store_states) rec.states.push_back(u);
        if (model.augmented && model.lift_derivatives) {
            const SpectralField primary = take_components(u, model.primary_components);
            const auto lifted = model.lift_derivatives(primary);
            const double scale = 1.0 + u.max_abs();
            for (size_t k = 0; k < lifted.size(); ++k) {
                const SpectralField actual = extract_component(
                    u, model.primary_components + static_cast<int>(k));
                SpectralField diff = actual;
                diff.add_scaled(lifted[k], -1.0);
                rec.consistency_max =
                    std::max(rec.consistency_max, diff.max_abs() / scale);
            }
        }
    };

    sample(0.0);
    for (long k = 1; k <= nsteps; ++k) {
        try {
            u = galerkin_step(model, u, params.dt, params.N);
        } catch (const BlowupDetected&) {
            rec.blew_up = true;
            rec.blowup_time = k * params.dt;
            break;
        }
        if (k % params.measure_every == 0) sample(k * params.dt);
    }
    rec.final_state = u;
    return rec;
}

// Largest measured ratio of the weighted sum of the right side against the
// declared bound, over random layout-appropriate states. A zero-over-zero
// entry counts as zero.
struct CertifyReport {
    double max_ratio = 0.0;
    int trials = 0;
    std::vector<double> per_trial;
};

inline CertifyReport certify_condition(const ModelSpec& model, int trials, int N,
                                       const std::vector<double>& zgrid, uint64_t seed) {
    validate_zgrid(zgrid);
    Rng rng(seed);
    CertifyReport rep;
    rep.trials = trials;
    for (int trial = 0; trial < trials; ++trial) {
        const SpectralField u = truncate(model.random_state(N, rng), N);
        const SpectralField r = model.rhs(u, 2 * N);
        const GeneratorCurve G = model.measure(u, zgrid);
        const GeneratorCurve dG = model.measure_dz(u, zgrid);
        const GeneratorCurve R = model.measure(r, zgrid);
        double worst = 0.0;
        for (size_t i = 0; i < zgrid.size(); ++i) {
            const double bound = model.condition_rhs(G.value[i], dG.value[i]);
            if (R.value[i] == 0.0) continue;
            if (bound == 0.0) {
                worst = std::numeric_limits<double>::infinity();
                continue;
            }
            worst = std::max(worst, R.value[i] / bound);
        }
        rep.per_trial.push_back(worst);
        rep.max_ratio = std::max(rep.max_ratio, worst);
    }
    return rep;
}

// Diagnostics CSV: t,energy,mass,radius_hat,max_tail_coeff per sample.
inline void write_diagnostics(std::ostream& out, const SimulationRecord& rec) {
    out << "t,energy,mass,radius_hat,max_tail_coeff\n";
    for (const Diagnostics& d : rec.diagnostics)
        out << fmt17(d.t) << ',' << fmt17(d.energy) << ',' << fmt17(d.mass) << ','
            << fmt17(d.radius_hat) << ',' << fmt17(d.max_tail_coeff) << '\n';
}

} // namespace genfun
