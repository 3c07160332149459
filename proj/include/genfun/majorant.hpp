#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "genfun/errors.hpp"
#include "genfun/generator.hpp"
#include "genfun/util.hpp"

namespace genfun {

// Power series with nonnegative coefficients, evaluated on nonnegative
// arguments. Acts as a scalar upper envelope for a nonlinearity.
struct MajorantSeries {
    std::vector<double> abs_coeffs;
    double radius = std::numeric_limits<double>::infinity();

    static MajorantSeries identity() { return MajorantSeries{{0.0, 1.0}, inf()}; }

    static MajorantSeries power(int n) {
        std::vector<double> c(static_cast<size_t>(n) + 1, 0.0);
        c.back() = 1.0;
        return MajorantSeries{std::move(c), inf()};
    }

    static MajorantSeries exponential(int terms = 30) {
        std::vector<double> c(static_cast<size_t>(terms), 0.0);
        double fact = 1.0;
        for (int n = 0; n < terms; ++n) {
            c[static_cast<size_t>(n)] = 1.0 / fact;
            fact *= static_cast<double>(n + 1);
        }
        return MajorantSeries{std::move(c), inf()};
    }

    static MajorantSeries from_coeffs(std::vector<double> c,
                                      double radius = inf()) {
        for (double a : c)
            if (a < 0.0) throw ConfigError("majorant coefficients must be nonnegative");
        return MajorantSeries{std::move(c), radius};
    }

private:
    static double inf() { return std::numeric_limits<double>::infinity(); }
};

// Evaluates the series at g >= 0, refusing arguments at or past the radius.
inline double majorant_value(const MajorantSeries& F, double g) {
    if (g < 0.0) throw NegativeZ("majorant argument must be nonnegative");
    if (std::isfinite(F.radius) && g >= F.radius)
        throw OutsideConvergence("argument " + fmt17(g) + " is outside radius " +
                                 fmt17(F.radius));
    double total = 0.0, gp = 1.0;
    for (double a : F.abs_coeffs) {
        total += a * gp;
        gp *= g;
    }
    return total;
}

// Composition bound: a curve value G majorizes the composed field, so F(G)
// majorizes the composition term by term.
inline double gen_compose_majorant(const MajorantSeries& F, double g) {
    return majorant_value(F, g);
}

// Data for the scalar continuation argument: constant C0 in front of the
// nonlinearity, its majorant F, the weight radius rho, and the initial
// curve level M0.
struct HopfProblem {
    double C0;
    MajorantSeries F;
    double rho;
    double M0;

    void validate() const {
        if (!(C0 >= 0.0)) throw ConfigError("C0 must be nonnegative");
        if (!(rho > 0.0)) throw ConfigError("rho must be positive");
        if (!(M0 >= 0.0)) throw ConfigError("M0 must be nonnegative");
    }
};

// Shrink factor of the comparison frame: theta(t) = 1 - F(3 M0) t / rho.
inline double theta(const HopfProblem& p, double t) {
    return 1.0 - majorant_value(p.F, 3.0 * p.M0) * t / p.rho;
}

// Guaranteed existence window: min(M0 / (C0 F(2 M0)), rho / F(3 M0)),
// with +infinity for trivial data or vanishing denominators.
inline double lifespan(const HopfProblem& p) {
    p.validate();
    const double inf = std::numeric_limits<double>::infinity();
    if (p.M0 == 0.0) return inf;
    const double d1 = p.C0 * majorant_value(p.F, 2.0 * p.M0);
    const double d2 = majorant_value(p.F, 3.0 * p.M0);
    const double t1 = d1 > 0.0 ? p.M0 / d1 : inf;
    const double t2 = d2 > 0.0 ? p.rho / d2 : inf;
    return std::min(t1, t2);
}

// First-order-in-time upper bound M0 + C0 t F(2 M0); the transported envelope
// stays below this line on the guaranteed window.
inline double closed_form_bound(const HopfProblem& p, double t) {
    return p.M0 + p.C0 * t * majorant_value(p.F, 2.0 * p.M0);
}

// Curve level at z = rho, the value that seeds the continuation argument.
// The curve must span [0, rho].
inline double compute_M0(const GeneratorCurve& curve, double rho) {
    if (curve.z.empty()) throw DomainMismatch("empty curve");
    const double tol = 1e-9 * std::max(1.0, rho);
    if (std::abs(curve.z.front()) > tol || std::abs(curve.z.back() - rho) > tol)
        throw DomainMismatch("curve spans [" + fmt17(curve.z.front()) + ", " +
                             fmt17(curve.z.back()) + "], expected [0, " + fmt17(rho) + "]");
    return *std::max_element(curve.value.begin(), curve.value.end());
}

// Time history of the transported envelope on a fixed (t, z) product grid.
struct MajorantEnvelope {
    HopfProblem problem;
    std::vector<double> tgrid;
    std::vector<double> zgrid;
    std::vector<std::vector<double>> numeric;
    std::vector<double> closed_form;
    std::vector<double> theta_vals;
};

namespace detail {

inline void validate_envelope_grids(const std::vector<double>& tgrid,
                                    const std::vector<double>& zgrid) {
    if (tgrid.size() < 2) throw DomainMismatch("time grid needs at least two entries");
    if (std::abs(tgrid.front()) > 1e-15) throw DomainMismatch("time grid must start at 0");
    for (size_t i = 1; i < tgrid.size(); ++i)
        if (tgrid[i] <= tgrid[i - 1]) throw DomainMismatch("time grid must be ascending");
    validate_zgrid(zgrid);
    if (zgrid.size() < 2) throw DomainMismatch("z-grid needs at least two entries");
    const double dz = zgrid[1] - zgrid[0];
    for (size_t i = 1; i < zgrid.size(); ++i)
        if (std::abs((zgrid[i] - zgrid[i - 1]) - dz) > 1e-12 * std::max(1.0, dz))
            throw GridMismatch("z-grid must be uniform");
}

} // namespace detail

// Explicit first-order integration of
//   dPhi/dt = C0 F(Phi) + (C0 F(Phi) + theta'(t) z) dPhi/dz
// from prescribed initial z-profile, with donor-cell upwinding: a positive
// transport speed takes the forward difference, a negative one the backward
// difference, and inflow at the right edge uses a zero-gradient ghost value.
// The supplied time grid is the step sequence; each step must satisfy
// dt <= dz / max|speed|.
inline MajorantEnvelope integrate_hopf_envelope_from(const HopfProblem& p,
                                                     std::vector<double> initial,
                                                     const std::vector<double>& tgrid,
                                                     const std::vector<double>& zgrid) {
    p.validate();
    detail::validate_envelope_grids(tgrid, zgrid);
    if (initial.size() != zgrid.size())
        throw GridMismatch("initial profile does not match the z-grid");
    const double dz = zgrid[1] - zgrid[0];
    const double dtheta = -majorant_value(p.F, 3.0 * p.M0) / p.rho;
    const size_t nz = zgrid.size();

    MajorantEnvelope env;
    env.problem = p;
    env.tgrid = tgrid;
    env.zgrid = zgrid;
    std::vector<double> phi = std::move(initial);
    env.numeric.push_back(phi);
    env.closed_form.push_back(closed_form_bound(p, tgrid.front()));
    env.theta_vals.push_back(theta(p, tgrid.front()));

    std::vector<double> next(nz);
    for (size_t k = 1; k < tgrid.size(); ++k) {
        const double t = tgrid[k - 1];
        const double dt = tgrid[k] - t;
        if (theta(p, tgrid[k]) <= 0.0)
            throw DomainMismatch("time grid extends past the frame collapse at t = " +
                                 fmt17(p.rho / majorant_value(p.F, 3.0 * p.M0)));
        double max_speed = 0.0;
        for (size_t j = 0; j < nz; ++j) {
            const double growth = p.C0 * majorant_value(p.F, phi[j]);
            const double speed = growth + dtheta * zgrid[j];
            max_speed = std::max(max_speed, std::abs(speed));
            double dphi;
            if (speed > 0.0) {
                dphi = (j + 1 < nz) ? (phi[j + 1] - phi[j]) / dz : 0.0;
            } else {
                dphi = (j > 0) ? (phi[j] - phi[j - 1]) / dz : (phi[1] - phi[0]) / dz;
            }
            next[j] = phi[j] + dt * (growth + speed * dphi);
        }
        if (max_speed > 0.0 && dt > dz / max_speed)
            throw CFLViolation("step " + fmt17(dt) + " exceeds the stability limit " +
                               fmt17(dz / max_speed));
        phi.swap(next);
        env.numeric.push_back(phi);
        env.closed_form.push_back(closed_form_bound(p, tgrid[k]));
        env.theta_vals.push_back(theta(p, tgrid[k]));
    }
    return env;
}

// Same integration started from the constant profile Phi(0, z) = M0.
inline MajorantEnvelope integrate_hopf_envelope(const HopfProblem& p,
                                                const std::vector<double>& tgrid,
                                                const std::vector<double>& zgrid) {
    return integrate_hopf_envelope_from(p, std::vector<double>(zgrid.size(), p.M0), tgrid,
                                        zgrid);
}

// Builds a step sequence through the given sample times, refined so that a
// conservative speed bound keeps each step under the given fraction of the
// stability limit. Sample times appear exactly in the output.
inline std::vector<double> build_step_tgrid(const HopfProblem& p,
                                            const std::vector<double>& sample_times,
                                            const std::vector<double>& zgrid,
                                            double cfl_fraction = 0.4) {
    if (sample_times.empty()) throw DomainMismatch("no sample times");
    validate_zgrid(zgrid);
    if (zgrid.size() < 2) throw DomainMismatch("z-grid needs at least two entries");
    const double dz = zgrid[1] - zgrid[0];
    const double speed_bound = (p.C0 + 1.0) * majorant_value(p.F, 3.0 * p.M0);
    std::vector<double> tgrid;
    tgrid.push_back(sample_times.front());
    for (size_t i = 1; i < sample_times.size(); ++i) {
        const double a = sample_times[i - 1], b = sample_times[i];
        if (b <= a) throw DomainMismatch("sample times must be ascending");
        int steps = 1;
        if (speed_bound > 0.0) {
            const double dt_max = cfl_fraction * dz / speed_bound;
            steps = std::max(1, static_cast<int>(std::ceil((b - a) / dt_max)));
        }
        for (int s = 1; s <= steps; ++s) tgrid.push_back(a + (b - a) * s / steps);
    }
    return tgrid;
}

namespace detail {

inline double interp_curve(const GeneratorCurve& c, double z) {
    if (z < c.z.front() - 1e-12 || z > c.z.back() + 1e-12)
        throw DomainMismatch("curve does not cover z = " + fmt17(z));
    if (z <= c.z.front()) return c.value.front();
    if (z >= c.z.back()) return c.value.back();
    size_t hi = 1;
    while (c.z[hi] < z) ++hi;
    const double w = (z - c.z[hi - 1]) / (c.z[hi] - c.z[hi - 1]);
    return (1.0 - w) * c.value[hi - 1] + w * c.value[hi];
}

} // namespace detail

// Outcome of comparing measured curves against the transported envelope.
struct DominationReport {
    bool pass = false;
    double tol = 1e-9;
    // Shrinking-frame comparison: measured curve read at theta(t) z_j against
    // the numeric envelope at z_j.
    double numeric_slack_max = -std::numeric_limits<double>::infinity();
    double numeric_argmax_t = 0.0;
    double numeric_argmax_z = 0.0;
    // Fixed-frame comparison: the measured curve's maximum against the
    // first-order bound at the same time.
    double closed_slack_max = -std::numeric_limits<double>::infinity();
    double closed_argmax_t = 0.0;
    double closed_argmax_z = 0.0;
};

// Checks that every measured curve stays below both envelope forms, with
// normalized slack (measured - bound) / (1 + bound) <= tol. Each measured
// time must coincide with an envelope time entry.
inline DominationReport check_domination(const MajorantEnvelope& env,
                                         const std::vector<double>& times,
                                         const std::vector<GeneratorCurve>& curves,
                                         double tol = 1e-9) {
    if (times.size() != curves.size())
        throw GridMismatch("sample times and curves differ in count");
    DominationReport rep;
    rep.tol = tol;
    for (size_t s = 0; s < times.size(); ++s) {
        const double t = times[s];
        size_t ti = env.tgrid.size();
        for (size_t k = 0; k < env.tgrid.size(); ++k)
            if (std::abs(env.tgrid[k] - t) <= 1e-9 * (1.0 + std::abs(t))) {
                ti = k;
                break;
            }
        if (ti == env.tgrid.size())
            throw GridMismatch("measured time " + fmt17(t) + " is not an envelope time");
        const double th = env.theta_vals[ti];
        const GeneratorCurve& curve = curves[s];
        for (size_t j = 0; j < env.zgrid.size(); ++j) {
            const double measured = detail::interp_curve(curve, th * env.zgrid[j]);
            const double bound = env.numeric[ti][j];
            const double slack = (measured - bound) / (1.0 + bound);
            if (slack > rep.numeric_slack_max) {
                rep.numeric_slack_max = slack;
                rep.numeric_argmax_t = t;
                rep.numeric_argmax_z = env.zgrid[j];
            }
        }
        const double cb = env.closed_form[ti];
        for (size_t j = 0; j < curve.z.size(); ++j) {
            const double slack = (curve.value[j] - cb) / (1.0 + cb);
            if (slack > rep.closed_slack_max) {
                rep.closed_slack_max = slack;
                rep.closed_argmax_t = t;
                rep.closed_argmax_z = curve.z[j];
            }
        }
    }
    rep.pass = rep.numeric_slack_max <= tol && rep.closed_slack_max <= tol;
    return rep;
}

// CSV form: header t,z,numeric,closed_form,theta then one row per (t, z) pair,
// t outer, z inner.
inline void write_envelope(std::ostream& out, const MajorantEnvelope& env) {
    out << "t,z,numeric,closed_form,theta\n";
    for (size_t k = 0; k < env.tgrid.size(); ++k)
        for (size_t j = 0; j < env.zgrid.size(); ++j)
            out << fmt17(env.tgrid[k]) << ',' << fmt17(env.zgrid[j]) << ','
                << fmt17(env.numeric[k][j]) << ',' << fmt17(env.closed_form[k]) << ','
                << fmt17(env.theta_vals[k]) << '\n';
}

inline void write_envelope(const std::string& path, const MajorantEnvelope& env) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    write_envelope(out, env);
}

// Rebuilds the grids and tables from CSV; the problem block is not stored in
// the file and is left default-initialized.
inline MajorantEnvelope read_envelope(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty envelope file");
    if (trim(line) != "t,z,numeric,closed_form,theta")
        throw ConfigError("malformed envelope header");
    MajorantEnvelope env;
    double cur_t = 0.0;
    bool have_row = false;
    std::vector<double> row;
    std::vector<double> zfirst;
    bool first_block = true;
    auto flush = [&]() {
        if (!have_row) return;
        if (first_block) {
            env.zgrid = zfirst;
            first_block = false;
        } else if (row.size() != env.zgrid.size()) {
            throw ConfigError("inconsistent z-grid across envelope blocks");
        }
        env.numeric.push_back(row);
        row.clear();
    };
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto toks = split_char(trim(line), ',');
        if (toks.size() != 5) throw ConfigError("malformed envelope row: '" + line + "'");
        const double t = parse_double(toks[0], "t");
        const double z = parse_double(toks[1], "z");
        const double v = parse_double(toks[2], "numeric");
        const double cf = parse_double(toks[3], "closed_form");
        const double th = parse_double(toks[4], "theta");
        if (!have_row || t != cur_t) {
            flush();
            cur_t = t;
            have_row = true;
            env.tgrid.push_back(t);
            env.closed_form.push_back(cf);
            env.theta_vals.push_back(th);
        }
        if (first_block) zfirst.push_back(z);
        row.push_back(v);
    }
    flush();
    if (env.tgrid.empty()) throw ConfigError("envelope file has no rows");
    return env;
}

inline MajorantEnvelope read_envelope(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "' for reading");
    return read_envelope(in);
}

} // namespace genfun
