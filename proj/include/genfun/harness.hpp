#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "genfun/config.hpp"
#include "genfun/errors.hpp"
#include "genfun/field.hpp"
#include "genfun/generator.hpp"
#include "genfun/majorant.hpp"
#include "genfun/models.hpp"
#include "genfun/util.hpp"

namespace genfun {

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
    return out;
}

inline ModelSpec build_model(const Config& c) {
    validate_config(c);
    if (c.model == "burgers") return burgers_model();
    if (c.model == "euler") return euler_model();
    if (c.model == "hydrostatic")
        return hydrostatic_model(c.nodes, c.rho, c.taylor_cap, c.augmented);
    VelocityGrid grid(c.vmin, c.vmax, c.v_points);
    const double m = c.weight_m < 0.0 ? 4.0 : c.weight_m;
    const PotentialLaw law =
        c.model == "vdb" ? PotentialLaw::density : PotentialLaw::second_moment;
    return kinetic_model(grid, law, c.taylor_cap, m, c.augmented);
}

inline SpectralField build_initial(const Config& c, const ModelSpec& model) {
    Rng rng(c.seed);
    SpectralField state{1, 0};
    if (c.initial == "sine") {
        state = preset_sine(c.N, c.amplitude);
    } else if (c.initial == "taylor_green") {
        state = preset_taylor_green(c.N, c.amplitude);
    } else if (c.initial == "shear") {
        state = preset_shear(c.N, ChebyshevGrid(c.nodes).nodes(), c.amplitude);
    } else if (c.initial == "perturbed_maxwellian") {
        state = preset_perturbed_maxwellian(c.N, VelocityGrid(c.vmin, c.vmax, c.v_points),
                                            c.epsilon);
    } else if (c.initial == "random") {
        return model.random_state(c.N, rng);
    } else {
        throw ConfigError("unknown initial kind '" + c.initial + "'");
    }
    if (!model.augmented) return state;
    std::vector<SpectralField> parts = model.lift_derivatives(state);
    parts.insert(parts.begin(), std::move(state));
    return stack_fields(parts);
}

// Result of one experiment: the simulation record plus the verdict of the
// envelope comparison (transported envelope for certified models, integrated
// empirical bound otherwise).
struct RunResult {
    Config config;
    SimulationRecord record;
    bool certified_path = false;
    double M0 = std::numeric_limits<double>::quiet_NaN();
    double lifespan_val = std::numeric_limits<double>::infinity();
    double rho_end = std::numeric_limits<double>::quiet_NaN();
    // Certified path.
    MajorantEnvelope envelope;
    DominationReport domination;
    std::vector<double> kept_times;
    // Empirical path.
    std::vector<double> empirical_env;
    std::vector<double> measured_max;
    std::vector<double> slope_max;
    double empirical_slack_max = -std::numeric_limits<double>::infinity();
    bool pass = false;
    std::string summary;
};

namespace detail {

inline double curve_max(const GeneratorCurve& c) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : c.value) m = std::max(m, v);
    return m;
}

inline bool curve_finite(const GeneratorCurve& c) {
    for (double v : c.value)
        if (!std::isfinite(v)) return false;
    return true;
}

// Integrates E' = bound(E, D_k) across the sample intervals with the slope
// level D_k frozen at the left endpoint, n_sub explicit substeps per interval.
inline std::vector<double> integrate_empirical_envelope(
    const std::vector<double>& times, const std::vector<double>& slope,
    double E0, const std::function<double(double, double)>& bound, int n_sub = 20) {
    std::vector<double> env;
    env.reserve(times.size());
    double E = E0;
    env.push_back(E);
    for (size_t k = 1; k < times.size(); ++k) {
        const double h = (times[k] - times[k - 1]) / n_sub;
        const double D = slope[k - 1];
        for (int s = 0; s < n_sub; ++s) E += h * bound(E, D);
        env.push_back(E);
    }
    return env;
}

inline std::string verdict_word(bool pass) { return pass ? "PASS" : "FAIL"; }

} // namespace detail

// Runs the configured experiment. For certified models the horizon is capped
// at the guaranteed lifespan, the transported envelope is integrated through
// the sample times, and domination is checked in both frames. Other models
// get the empirical bound built from their declared condition.
inline RunResult run_experiment(const Config& config_in) {
    Config config = config_in;
    validate_config(config);
    RunResult res;
    res.config = config;

    const ModelSpec model = build_model(config);
    const SpectralField u0 = build_initial(config, model);
    const std::vector<double> zgrid = linspace(0.0, config.rho, config.z_points);

    res.certified_path = model.framework_certified;
    double T_run = config.T;
    HopfProblem problem{model.C0, model.F, config.rho, 0.0};
    if (res.certified_path) {
        const GeneratorCurve c0 = model.measure(truncate(u0, config.N), zgrid);
        res.M0 = compute_M0(c0, config.rho);
        problem.M0 = res.M0;
        res.lifespan_val = lifespan(problem);
        T_run = std::min(T_run, res.lifespan_val);
    }

    SimParams params;
    params.N = config.N;
    params.dt = config.dt;
    params.T = T_run;
    params.zgrid = zgrid;
    params.measure_every = config.measure_every;
    params.store_states = config.store_fields;
    params.measure_slope = !res.certified_path;
    res.record = simulate(model, u0, params);
    if (!res.record.diagnostics.empty())
        res.rho_end = res.record.diagnostics.back().radius_hat;

    if (res.record.blew_up) {
        res.pass = false;
        res.summary = "FAIL lifespan=" + fmt17(res.lifespan_val) +
                      " rho_end=" + fmt17(res.rho_end) +
                      " blowup_t=" + fmt17(res.record.blowup_time);
        return res;
    }

    if (res.certified_path) {
        std::vector<GeneratorCurve> kept_curves;
        for (size_t k = 0; k < res.record.times.size(); ++k) {
            if (theta(problem, res.record.times[k]) <= 1e-9) break;
            res.kept_times.push_back(res.record.times[k]);
            kept_curves.push_back(res.record.curves[k]);
        }
        if (res.kept_times.size() < 2) {
            // Degenerate window: only the initial sample precedes the frame
            // collapse, so the envelope is its initial data.
            res.envelope.problem = problem;
            res.envelope.tgrid = {0.0};
            res.envelope.zgrid = zgrid;
            res.envelope.numeric = {std::vector<double>(zgrid.size(), problem.M0)};
            res.envelope.closed_form = {closed_form_bound(problem, 0.0)};
            res.envelope.theta_vals = {1.0};
        } else {
            const std::vector<double> tgrid =
                build_step_tgrid(problem, res.kept_times, zgrid, config.cfl_fraction);
            res.envelope = integrate_hopf_envelope(problem, tgrid, zgrid);
        }
        res.domination = check_domination(res.envelope, res.kept_times, kept_curves);
        res.pass = res.domination.pass;
    } else {
        bool finite = true;
        for (size_t k = 0; k < res.record.times.size(); ++k) {
            finite = finite && detail::curve_finite(res.record.curves[k]) &&
                     detail::curve_finite(res.record.dz_curves[k]);
            res.measured_max.push_back(detail::curve_max(res.record.curves[k]));
            res.slope_max.push_back(detail::curve_max(res.record.dz_curves[k]));
        }
        res.kept_times = res.record.times;
        res.empirical_env = detail::integrate_empirical_envelope(
            res.record.times, res.slope_max, res.measured_max.front(), model.condition_rhs);
        for (size_t k = 0; k < res.measured_max.size(); ++k) {
            const double slack =
                (res.measured_max[k] - res.empirical_env[k]) / (1.0 + res.empirical_env[k]);
            res.empirical_slack_max = std::max(res.empirical_slack_max, slack);
        }
        res.pass = finite && res.empirical_slack_max <= 1e-9;
    }

    res.summary = detail::verdict_word(res.pass) + " lifespan=" + fmt17(res.lifespan_val) +
                  " rho_end=" + fmt17(res.rho_end);
    return res;
}

namespace detail {

inline std::string sample_name(size_t idx, const char* ext) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sample_%04zu.%s", idx, ext);
    return std::string(buf);
}

} // namespace detail

// Writes the artifact tree for a finished run:
//   config.txt, samples.csv, curves/, dzcurves/ (empirical), fields/
//   (optional), diagnostics.csv, envelope.csv or empirical.csv, report.txt,
//   summary.txt.
inline void write_artifacts(const RunResult& res, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    fs::create_directories(dir + "/curves");
    if (!res.certified_path) fs::create_directories(dir + "/dzcurves");
    if (res.config.store_fields) fs::create_directories(dir + "/fields");

    {
        std::ofstream out(dir + "/config.txt");
        out << serialize_config(res.config);
    }
    {
        std::ofstream out(dir + "/samples.csv");
        out << "idx,t,curve,field\n";
        for (size_t k = 0; k < res.record.times.size(); ++k) {
            out << k << ',' << fmt17(res.record.times[k]) << ","
                << "curves/" << detail::sample_name(k, "csv") << ',';
            if (res.config.store_fields) out << "fields/" << detail::sample_name(k, "fld");
            out << '\n';
        }
    }
    for (size_t k = 0; k < res.record.curves.size(); ++k)
        write_curve(dir + "/curves/" + detail::sample_name(k, "csv"), res.record.curves[k]);
    for (size_t k = 0; k < res.record.dz_curves.size(); ++k)
        write_curve(dir + "/dzcurves/" + detail::sample_name(k, "csv"),
                    res.record.dz_curves[k]);
    if (res.config.store_fields)
        for (size_t k = 0; k < res.record.states.size(); ++k)
            write_field(dir + "/fields/" + detail::sample_name(k, "fld"),
                        res.record.states[k]);
    {
        std::ofstream out(dir + "/diagnostics.csv");
        write_diagnostics(out, res.record);
    }
    if (res.certified_path && !res.record.blew_up) {
        write_envelope(dir + "/envelope.csv", res.envelope);
    } else if (!res.certified_path) {
        std::ofstream out(dir + "/empirical.csv");
        out << "t,measured_max,slope_max,envelope\n";
        for (size_t k = 0; k < res.kept_times.size(); ++k)
            out << fmt17(res.kept_times[k]) << ',' << fmt17(res.measured_max[k]) << ','
                << fmt17(res.slope_max[k]) << ',' << fmt17(res.empirical_env[k]) << '\n';
    }
    {
        std::ofstream out(dir + "/report.txt");
        out << "verdict: " << detail::verdict_word(res.pass) << '\n';
        out << "model: " << res.config.model << '\n';
        out << "certified: " << (res.certified_path ? 1 : 0) << '\n';
        out << "blowup: " << (res.record.blew_up ? 1 : 0) << '\n';
        out << "samples: " << res.record.times.size() << '\n';
        out << "lifespan: " << fmt17(res.lifespan_val) << '\n';
        out << "M0: " << fmt17(res.M0) << '\n';
        out << "rho: " << fmt17(res.config.rho) << '\n';
        out << "rho_end: " << fmt17(res.rho_end) << '\n';
        if (res.certified_path) {
            out << "numeric_slack_max: " << fmt17(res.domination.numeric_slack_max) << '\n';
            out << "numeric_argmax_t: " << fmt17(res.domination.numeric_argmax_t) << '\n';
            out << "numeric_argmax_z: " << fmt17(res.domination.numeric_argmax_z) << '\n';
            out << "closed_slack_max: " << fmt17(res.domination.closed_slack_max) << '\n';
            out << "closed_argmax_t: " << fmt17(res.domination.closed_argmax_t) << '\n';
            out << "closed_argmax_z: " << fmt17(res.domination.closed_argmax_z) << '\n';
            out << "tolerance: " << fmt17(res.domination.tol) << '\n';
        } else {
            out << "empirical_slack_max: " << fmt17(res.empirical_slack_max) << '\n';
            out << "tolerance: " << fmt17(1e-9) << '\n';
        }
        out << "consistency_max: " << fmt17(res.record.consistency_max) << '\n';
    }
    {
        std::ofstream out(dir + "/summary.txt");
        out << res.summary << '\n';
    }
}

inline RunResult run_and_write(const Config& config) {
    RunResult res = run_experiment(config);
    write_artifacts(res, config.outdir);
    return res;
}

// Outcome of re-verifying a stored artifact tree.
struct CheckResult {
    bool stored_pass = false;
    bool recomputed_pass = false;
    bool agree = false;
    std::string detail;
};

// Re-reads an artifact tree and recomputes its verdict from the stored curves
// and envelope tables, without re-running the simulation.
inline CheckResult check_artifacts(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::exists(dir + "/report.txt") || !fs::exists(dir + "/samples.csv") ||
        !fs::exists(dir + "/config.txt"))
        throw ConfigError("artifact tree at '" + dir + "' is incomplete");
    const Config config = load_config(dir + "/config.txt");
    const ModelSpec model = build_model(config);

    std::string stored_verdict;
    bool certified = false;
    {
        std::ifstream in(dir + "/report.txt");
        std::string line;
        while (std::getline(in, line)) {
            auto toks = split_char(trim(line), ':');
            if (toks.size() != 2) continue;
            const std::string key = trim(toks[0]), val = trim(toks[1]);
            if (key == "verdict") stored_verdict = val;
            if (key == "certified") certified = val == "1";
        }
        if (stored_verdict.empty()) throw ConfigError("report lacks a verdict line");
    }

    std::vector<double> times;
    std::vector<GeneratorCurve> curves;
    {
        std::ifstream in(dir + "/samples.csv");
        std::string line;
        if (!std::getline(in, line) || trim(line) != "idx,t,curve,field")
            throw ConfigError("malformed samples index");
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            auto toks = split_char(trim(line), ',');
            if (toks.size() != 4) throw ConfigError("malformed samples row");
            times.push_back(parse_double(toks[1], "t"));
            curves.push_back(read_curve(dir + "/" + toks[2]));
        }
    }

    CheckResult out;
    out.stored_pass = stored_verdict == "PASS";
    if (certified) {
        MajorantEnvelope env = read_envelope(dir + "/envelope.csv");
        std::vector<double> kept;
        std::vector<GeneratorCurve> kept_curves;
        for (size_t k = 0; k < times.size(); ++k) {
            bool present = false;
            for (double t : env.tgrid)
                if (std::abs(t - times[k]) <= 1e-9 * (1.0 + std::abs(times[k]))) {
                    present = true;
                    break;
                }
            if (present) {
                kept.push_back(times[k]);
                kept_curves.push_back(curves[k]);
            }
        }
        const DominationReport rep = check_domination(env, kept, kept_curves);
        out.recomputed_pass = rep.pass;
        out.detail = "numeric_slack_max=" + fmt17(rep.numeric_slack_max) +
                     " closed_slack_max=" + fmt17(rep.closed_slack_max);
    } else {
        std::ifstream in(dir + "/empirical.csv");
        if (!in) throw ConfigError("missing empirical table");
        std::string line;
        if (!std::getline(in, line) || trim(line) != "t,measured_max,slope_max,envelope")
            throw ConfigError("malformed empirical table");
        std::vector<double> ts, meas, slope, env_stored;
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            auto toks = split_char(trim(line), ',');
            if (toks.size() != 4) throw ConfigError("malformed empirical row");
            ts.push_back(parse_double(toks[0], "t"));
            meas.push_back(parse_double(toks[1], "measured_max"));
            slope.push_back(parse_double(toks[2], "slope_max"));
            env_stored.push_back(parse_double(toks[3], "envelope"));
        }
        if (ts.empty()) throw ConfigError("empty empirical table");
        const std::vector<double> env = detail::integrate_empirical_envelope(
            ts, slope, meas.front(), model.condition_rhs);
        double slack = -std::numeric_limits<double>::infinity();
        double env_mismatch = 0.0;
        for (size_t k = 0; k < ts.size(); ++k) {
            slack = std::max(slack, (meas[k] - env[k]) / (1.0 + env[k]));
            env_mismatch = std::max(
                env_mismatch, std::abs(env[k] - env_stored[k]) / (1.0 + std::abs(env[k])));
        }
        out.recomputed_pass = slack <= 1e-9 && env_mismatch <= 1e-12;
        out.detail = "empirical_slack_max=" + fmt17(slack) +
                     " envelope_mismatch=" + fmt17(env_mismatch);
    }
    out.agree = out.stored_pass == out.recomputed_pass;
    return out;
}

// One sweep point: the overridden value and the run it produced.
struct SweepPoint {
    double value;
    RunResult result;
};

struct SweepResult {
    std::string axis;
    std::vector<SweepPoint> points;
    std::vector<double> diff_linf;  // between consecutive final states
    std::vector<double> diff_l1;
    std::vector<double> orders; // log-ratio orders where value ratios allow
    bool all_pass = true;
};

namespace detail {

inline void union_diff(const SpectralField& a, const SpectralField& b, double& linf,
                       double& l1) {
    linf = 0.0;
    l1 = 0.0;
    const SpectralField diff = add_fields(a, scaled(b, -1.0));
    const int nn = diff.node_count();
    diff.for_each_mode([&](const Mode&, size_t idx) {
        for (int c = 0; c < diff.components(); ++c) {
            const Complex* p = diff.mode_ptr(idx, c);
            double node_worst = 0.0;
            for (int j = 0; j < nn; ++j) node_worst = std::max(node_worst, std::abs(p[j]));
            linf = std::max(linf, node_worst);
            l1 += node_worst;
        }
    });
}

} // namespace detail

// Runs the experiment across values of one axis (N, dt, or taylor_cap),
// writing each run under outdir/<axis>_<value> plus a sweep.csv table of
// consecutive final-state differences and, where value ratios are uniform
// halvings or doublings, observed orders.
inline SweepResult run_sweep(const Config& base, const std::string& axis,
                             const std::vector<double>& values) {
    if (axis != "N" && axis != "dt" && axis != "taylor_cap")
        throw ConfigError("sweep axis must be N, dt, or taylor_cap");
    if (values.size() < 2) throw ConfigError("sweep needs at least two values");
    SweepResult sweep;
    sweep.axis = axis;
    for (double v : values) {
        Config c = base;
        std::string vstr;
        if (axis == "dt") {
            c.dt = v;
            vstr = fmt17(v);
        } else {
            const int iv = static_cast<int>(std::llround(v));
            if (axis == "N") c.N = iv;
            else c.taylor_cap = iv;
            vstr = std::to_string(iv);
        }
        c.outdir = base.outdir + "/" + axis + "_" + vstr;
        RunResult r = run_experiment(c);
        write_artifacts(r, c.outdir);
        sweep.all_pass = sweep.all_pass && r.pass;
        sweep.points.push_back(SweepPoint{v, std::move(r)});
    }
    for (size_t i = 1; i < sweep.points.size(); ++i) {
        double linf, l1;
        detail::union_diff(sweep.points[i - 1].result.record.final_state,
                           sweep.points[i].result.record.final_state, linf, l1);
        sweep.diff_linf.push_back(linf);
        sweep.diff_l1.push_back(l1);
    }
    for (size_t i = 1; i < sweep.diff_linf.size(); ++i) {
        const double r0 = values[i] / values[i - 1];
        const double r1 = values[i + 1] / values[i];
        if (std::abs(r0 - r1) < 1e-12 && sweep.diff_linf[i] > 0.0 &&
            std::abs(std::log(r0)) > 0.0) {
            sweep.orders.push_back(std::log(sweep.diff_linf[i - 1] / sweep.diff_linf[i]) /
                                   std::abs(std::log(r0)));
        } else {
            sweep.orders.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    std::ofstream out(base.outdir + "/sweep.csv");
    out << "value,verdict,diff_linf,diff_l1,order\n";
    for (size_t i = 0; i < sweep.points.size(); ++i) {
        out << fmt17(sweep.points[i].value) << ','
            << detail::verdict_word(sweep.points[i].result.pass) << ',';
        if (i >= 1) out << fmt17(sweep.diff_linf[i - 1]) << ',' << fmt17(sweep.diff_l1[i - 1]);
        else out << ',';
        out << ',';
        if (i >= 2) out << fmt17(sweep.orders[i - 2]);
        out << '\n';
    }
    return sweep;
}

// Random-pair sweep of the structural inequalities, alternating dimensions.
struct CalculusSuiteReport {
    int trials = 0;
    double worst_sum_slack = std::numeric_limits<double>::infinity();
    double worst_product_slack = std::numeric_limits<double>::infinity();
    double worst_gradient_resid = 0.0;
    double worst_time_slack = std::numeric_limits<double>::infinity();
    bool pass = true;
};

inline CalculusSuiteReport run_calculus_suite(int trials, uint64_t seed) {
    Rng rng(seed);
    CalculusSuiteReport rep;
    rep.trials = trials;
    const std::vector<double> zgrid = linspace(0.0, 1.0, 17);
    for (int k = 0; k < trials; ++k) {
        const int dim = (k % 2 == 0) ? 1 : 2;
        const int N = dim == 1 ? 4 + (k % 13) : 2 + (k % 7);
        const SpectralField f = random_scalar(dim, N, 1.0, 0.6, rng);
        const SpectralField g = random_scalar(dim, N, 0.8, 0.5, rng);
        const CalculusReport r = check_calculus(f, g, zgrid);
        rep.worst_sum_slack = std::min(rep.worst_sum_slack, r.sum_slack_min);
        rep.worst_product_slack = std::min(rep.worst_product_slack, r.product_slack_min);
        rep.worst_gradient_resid = std::max(rep.worst_gradient_resid, r.gradient_resid_max);
        rep.worst_time_slack = std::min(rep.worst_time_slack, r.time_slack_min);
        rep.pass = rep.pass && r.pass;
    }
    return rep;
}

} // namespace genfun
