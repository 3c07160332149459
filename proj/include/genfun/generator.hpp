#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "genfun/chebyshev.hpp"
#include "genfun/errors.hpp"
#include "genfun/field.hpp"
#include "genfun/util.hpp"
#include "genfun/velocity_grid.hpp"

namespace genfun {

// Largest transverse Taylor order that stays numerically stable at the default
// collocation resolutions; repeated spectral differentiation amplifies
// rounding by roughly the square of the node count per application.
inline constexpr int kTaylorCapLimit = 12;

enum class GeneratorVariant { fourier, mixed, kinetic };

inline std::string variant_name(GeneratorVariant v) {
    switch (v) {
        case GeneratorVariant::fourier: return "fourier";
        case GeneratorVariant::mixed: return "mixed";
        case GeneratorVariant::kinetic: return "kinetic";
    }
    return "fourier";
}

inline GeneratorVariant variant_from_name(const std::string& s) {
    if (s == "fourier") return GeneratorVariant::fourier;
    if (s == "mixed") return GeneratorVariant::mixed;
    if (s == "kinetic") return GeneratorVariant::kinetic;
    throw ConfigError("unknown curve variant '" + s + "'");
}

// Sampled values of an exponentially weighted coefficient sum over a z-grid.
struct GeneratorCurve {
    GeneratorVariant variant = GeneratorVariant::fourier;
    std::vector<double> z;
    std::vector<double> value;
    int taylor_cap = 0;
    double weight_m = 0.0;
};

inline void validate_zgrid(const std::vector<double>& zgrid) {
    if (zgrid.empty()) throw DomainMismatch("empty z-grid");
    for (size_t i = 0; i < zgrid.size(); ++i) {
        if (zgrid[i] < 0.0) throw NegativeZ("z-grid contains a negative entry");
        if (i > 0 && zgrid[i] <= zgrid[i - 1])
            throw DomainMismatch("z-grid must be strictly ascending");
    }
}

namespace detail {

// One weighted-sum term: weight |alpha|_2 plus Taylor amplitudes a_beta, so
// the contribution at z is e^{z w} * sum_beta a_beta z^beta / beta!.
struct ModeTerm {
    double weight;
    std::vector<double> amps;
};

inline double eval_terms(const std::vector<ModeTerm>& terms, double z, bool dz) {
    double total = 0.0;
    for (const auto& t : terms) {
        const double e = std::exp(z * t.weight);
        double poly = 0.0, dpoly = 0.0, zpow = 1.0, fact = 1.0;
        for (size_t b = 0; b < t.amps.size(); ++b) {
            const double term = t.amps[b] * zpow / fact;
            poly += term;
            if (dz && b + 1 < t.amps.size()) {
                // derivative of z^{b+1}/(b+1)! is z^b/b!
                dpoly += t.amps[b + 1] * zpow / fact;
            }
            zpow *= z;
            fact *= static_cast<double>(b + 1);
        }
        total += dz ? e * (t.weight * poly + dpoly) : e * poly;
    }
    return total;
}

inline GeneratorCurve curve_from_terms(const std::vector<ModeTerm>& terms,
                                       const std::vector<double>& zgrid,
                                       GeneratorVariant variant, int B, double m, bool dz) {
    GeneratorCurve c;
    c.variant = variant;
    c.z = zgrid;
    c.taylor_cap = B;
    c.weight_m = m;
    c.value.reserve(zgrid.size());
    for (double z : zgrid) c.value.push_back(eval_terms(terms, z, dz));
    return c;
}

// Euclidean amplitude across components at one (mode, node) slot.
inline double comp_norm(const SpectralField& f, size_t idx, int node) {
    double s = 0.0;
    for (int c = 0; c < f.components(); ++c) {
        const Complex v = f.mode_ptr(idx, c)[node];
        s += std::norm(v);
    }
    return std::sqrt(s);
}

inline std::vector<ModeTerm> fourier_terms(const SpectralField& f) {
    if (f.kind() != Transverse::none)
        throw DimensionMismatch("this weighting needs a purely periodic field");
    std::vector<ModeTerm> terms;
    terms.reserve(f.mode_count());
    f.for_each_mode([&](const Mode& m, size_t idx) {
        const double amp = comp_norm(f, idx, 0);
        if (amp == 0.0) return;
        terms.push_back(ModeTerm{mode_l2(m), {amp}});
    });
    return terms;
}

// Shared mixed/kinetic assembly: per mode, Taylor amplitudes a_beta are the
// node-wise sup of weight(v or y) * |beta-th transverse derivative|.
template <typename DerivOp>
inline std::vector<ModeTerm> transverse_terms(const SpectralField& f, int B,
                                              const std::vector<double>& sup_weight,
                                              DerivOp&& deriv) {
    if (B < 0) throw TaylorCapTooLarge("Taylor order must be nonnegative");
    if (B > kTaylorCapLimit)
        throw TaylorCapTooLarge("Taylor order " + std::to_string(B) +
                                " exceeds the stable cap " + std::to_string(kTaylorCapLimit));
    const int nn = f.node_count();
    std::vector<ModeTerm> terms;
    terms.reserve(f.mode_count());
    f.for_each_mode([&](const Mode& m, size_t) {
        ModeTerm t;
        t.weight = mode_l2(m);
        t.amps.assign(static_cast<size_t>(B) + 1, 0.0);
        terms.push_back(std::move(t));
    });
    SpectralField cur = f;
    for (int b = 0; b <= B; ++b) {
        size_t k = 0;
        cur.for_each_mode([&](const Mode&, size_t idx) {
            double sup = 0.0;
            for (int j = 0; j < nn; ++j)
                sup = std::max(sup, sup_weight[j] * comp_norm(cur, idx, j));
            terms[k].amps[static_cast<size_t>(b)] = sup;
            ++k;
        });
        if (b < B) cur = deriv(cur);
    }
    terms.erase(std::remove_if(terms.begin(), terms.end(),
                               [](const ModeTerm& t) {
                                   for (double a : t.amps)
                                       if (a != 0.0) return false;
                                   return true;
                               }),
                terms.end());
    return terms;
}

} // namespace detail

// Sum over modes of e^{z |alpha|_2} times the Euclidean coefficient magnitude.
inline GeneratorCurve gen_fourier(const SpectralField& f, const std::vector<double>& zgrid) {
    validate_zgrid(zgrid);
    return detail::curve_from_terms(detail::fourier_terms(f), zgrid,
                                    GeneratorVariant::fourier, 0, 0.0, false);
}

// Exact z-derivative of the same finite sum.
inline GeneratorCurve gen_fourier_dz(const SpectralField& f, const std::vector<double>& zgrid) {
    validate_zgrid(zgrid);
    return detail::curve_from_terms(detail::fourier_terms(f), zgrid,
                                    GeneratorVariant::fourier, 0, 0.0, true);
}

// Channel variant: per mode, the transverse profile enters through the sup-norms
// of its collocation derivatives up to order B, combined as a Taylor polynomial
// in z. Nodes must be the Gauss-Lobatto family.
inline GeneratorCurve gen_mixed(const SpectralField& f, const std::vector<double>& zgrid,
                                int B) {
    validate_zgrid(zgrid);
    if (f.kind() != Transverse::chebyshev_y)
        throw DimensionMismatch("mixed weighting needs a chebyshev_y field");
    if (!ChebyshevGrid::matches(f.nodes()))
        throw GridMismatch("nodes are not a Gauss-Lobatto family");
    ChebyshevGrid grid(static_cast<int>(f.nodes().size()));
    std::vector<double> ones(f.nodes().size(), 1.0);
    auto terms = detail::transverse_terms(
        f, B, ones, [&](const SpectralField& g) { return apply_node_matrix(g, grid.diff()); });
    return detail::curve_from_terms(terms, zgrid, GeneratorVariant::mixed, B, 0.0, false);
}

inline GeneratorCurve gen_mixed_dz(const SpectralField& f, const std::vector<double>& zgrid,
                                   int B) {
    validate_zgrid(zgrid);
    if (f.kind() != Transverse::chebyshev_y)
        throw DimensionMismatch("mixed weighting needs a chebyshev_y field");
    if (!ChebyshevGrid::matches(f.nodes()))
        throw GridMismatch("nodes are not a Gauss-Lobatto family");
    ChebyshevGrid grid(static_cast<int>(f.nodes().size()));
    std::vector<double> ones(f.nodes().size(), 1.0);
    auto terms = detail::transverse_terms(
        f, B, ones, [&](const SpectralField& g) { return apply_node_matrix(g, grid.diff()); });
    return detail::curve_from_terms(terms, zgrid, GeneratorVariant::mixed, B, 0.0, true);
}

// Phase-space variant: velocity profiles are measured in the sup norm weighted
// by <v>^m, with v-derivatives up to order B entering as Taylor terms in z.
// The weight exponent must exceed dim + 2 so velocity moments of the weighted
// sup norm converge, and the weighted data must have decayed at the grid edge.
inline GeneratorCurve gen_kinetic(const SpectralField& f, const std::vector<double>& zgrid,
                                  int B, double m, const VelocityGrid& grid) {
    validate_zgrid(zgrid);
    check_kinetic_layout(f, grid);
    if (m <= f.dim() + 2)
        throw WeightTooSmall("weight exponent " + fmt17(m) + " must exceed " +
                             std::to_string(f.dim() + 2));
    auto w = grid.weight(m);
    double global = 0.0, edge = 0.0;
    const int nn = grid.n;
    f.for_each_mode([&](const Mode&, size_t idx) {
        for (int j = 0; j < nn; ++j) {
            const double a = w[j] * detail::comp_norm(f, idx, j);
            global = std::max(global, a);
            if (j == 0 || j == nn - 1) edge = std::max(edge, a);
        }
    });
    if (global > 0.0 && edge >= 1e-12 * global)
        throw GridNotDecayed("weighted amplitude at the velocity-grid edge is " + fmt17(edge) +
                             " against a peak of " + fmt17(global));
    auto terms = detail::transverse_terms(
        f, B, w, [&](const SpectralField& g) { return v_derivative(g, grid); });
    return detail::curve_from_terms(terms, zgrid, GeneratorVariant::kinetic, B, m, false);
}

inline GeneratorCurve gen_kinetic_dz(const SpectralField& f, const std::vector<double>& zgrid,
                                     int B, double m, const VelocityGrid& grid) {
    GeneratorCurve c = gen_kinetic(f, zgrid, B, m, grid);
    auto w = grid.weight(m);
    auto terms = detail::transverse_terms(
        f, c.taylor_cap, w, [&](const SpectralField& g) { return v_derivative(g, grid); });
    return detail::curve_from_terms(terms, zgrid, GeneratorVariant::kinetic, B, m, true);
}

// Dispatches on the field's layout with default transverse settings.
inline GeneratorCurve gen_curve(const SpectralField& f, const std::vector<double>& zgrid,
                                int B = 10, double m = -1.0) {
    switch (f.kind()) {
        case Transverse::none: return gen_fourier(f, zgrid);
        case Transverse::chebyshev_y: return gen_mixed(f, zgrid, B);
        case Transverse::grid_v: {
            const auto& nodes = f.nodes();
            VelocityGrid grid(nodes.front(), nodes.back(), static_cast<int>(nodes.size()));
            const double mm = m < 0.0 ? static_cast<double>(f.dim() + 3) : m;
            return gen_kinetic(f, zgrid, B, mm, grid);
        }
    }
    throw DimensionMismatch("unknown field layout");
}

// Membership certificate for the weighted space of radius rho: the curve value
// at z = rho, and whether it is finite.
struct SpaceMembership {
    double rho;
    double value;
    bool finite;
};

inline SpaceMembership space_membership(const SpectralField& f, double rho, int B = 10,
                                        double m = -1.0) {
    if (rho < 0.0) throw NegativeZ("radius must be nonnegative");
    GeneratorCurve c = gen_curve(f, {rho}, B, m);
    return SpaceMembership{rho, c.value[0], std::isfinite(c.value[0])};
}

// Slack report for the structural inequalities of the weighted sums:
// subadditivity under +, submultiplicativity under the spectral product,
// exactness of the gradient identity, and the forward-difference bound in time.
struct CalculusReport {
    double sum_slack_min = 0.0;
    double product_slack_min = 0.0;
    double gradient_resid_max = 0.0;
    double time_slack_min = 0.0;
    double scale = 0.0;
    bool pass = false;
};

inline CalculusReport check_calculus(const SpectralField& f, const SpectralField& g,
                                     const std::vector<double>& zgrid, double h = 1e-2) {
    validate_zgrid(zgrid);
    if (f.dim() != g.dim()) throw DimensionMismatch("operands differ in dimension");
    if (f.kind() != Transverse::none || g.kind() != Transverse::none)
        throw DimensionMismatch("calculus check covers purely periodic fields");
    if (f.components() != 1 || g.components() != 1)
        throw DimensionMismatch("calculus check covers scalar fields");

    const GeneratorCurve cf = gen_fourier(f, zgrid);
    const GeneratorCurve cg = gen_fourier(g, zgrid);
    const GeneratorCurve csum = gen_fourier(add_fields(f, g), zgrid);
    const GeneratorCurve cprod = gen_fourier(convolve(f, g), zgrid);
    std::vector<SpectralField> grads;
    for (int axis = 0; axis < f.dim(); ++axis) grads.push_back(derivative(f, axis));
    const GeneratorCurve cgrad = gen_fourier(stack_fields(grads), zgrid);
    const GeneratorCurve cdz = gen_fourier_dz(f, zgrid);
    const GeneratorCurve cstep = gen_fourier(add_fields(f, scaled(g, h)), zgrid);

    CalculusReport r;
    r.sum_slack_min = std::numeric_limits<double>::infinity();
    r.product_slack_min = std::numeric_limits<double>::infinity();
    r.time_slack_min = std::numeric_limits<double>::infinity();
    double scale = 1.0;
    for (size_t i = 0; i < zgrid.size(); ++i) {
        scale = std::max({scale, cf.value[i], cg.value[i], cf.value[i] * cg.value[i]});
        r.sum_slack_min = std::min(r.sum_slack_min, cf.value[i] + cg.value[i] - csum.value[i]);
        r.product_slack_min =
            std::min(r.product_slack_min, cf.value[i] * cg.value[i] - cprod.value[i]);
        r.gradient_resid_max = std::max(
            r.gradient_resid_max,
            std::abs(cgrad.value[i] - cdz.value[i]) / (1.0 + std::abs(cdz.value[i])));
        r.time_slack_min = std::min(
            r.time_slack_min, cg.value[i] - (cstep.value[i] - cf.value[i]) / h);
    }
    r.scale = scale;
    const double tol = 1e-12 * scale;
    r.pass = r.sum_slack_min >= -tol && r.product_slack_min >= -tol &&
             r.gradient_resid_max <= 1e-12 && r.time_slack_min >= -tol;
    return r;
}

// Least-squares fit of log amplitude against |alpha|_2 over modes above the
// floor; the negated slope estimates the decay rate of the coefficients.
struct RadiusFit {
    double rho_hat;
    double prefactor;
    int points_used;
};

inline RadiusFit radius_estimate(const SpectralField& f, double floor = 1e-14) {
    const int nn = f.node_count();
    std::vector<double> xs, ys;
    f.for_each_mode([&](const Mode& m, size_t idx) {
        double amp = 0.0;
        for (int j = 0; j < nn; ++j) amp = std::max(amp, detail::comp_norm(f, idx, j));
        if (amp > floor) {
            xs.push_back(mode_l2(m));
            ys.push_back(std::log(amp));
        }
    });
    const int n = static_cast<int>(xs.size());
    if (n < 4)
        throw TooFewModes("only " + std::to_string(n) +
                          " modes above the floor; need at least 4");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom <= 0.0) throw TooFewModes("mode weights are degenerate; cannot fit a slope");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    return RadiusFit{-slope, std::exp(intercept), n};
}

// Geometric-tail prediction sum_{k > N} 2 C e^{-rho k} for a fitted 1-d decay.
inline double predicted_tail_l1(const RadiusFit& fit, int N) {
    const double q = std::exp(-fit.rho_hat);
    return 2.0 * fit.prefactor * std::pow(q, N + 1) / (1.0 - q);
}

// CSV form: header z,value,variant,B,m then one row per z sample.
inline void write_curve(std::ostream& out, const GeneratorCurve& c) {
    out << "z,value,variant,B,m\n";
    for (size_t i = 0; i < c.z.size(); ++i)
        out << fmt17(c.z[i]) << ',' << fmt17(c.value[i]) << ',' << variant_name(c.variant)
            << ',' << c.taylor_cap << ',' << fmt17(c.weight_m) << '\n';
}

inline void write_curve(const std::string& path, const GeneratorCurve& c) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    write_curve(out, c);
}

inline GeneratorCurve read_curve(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty curve file");
    if (trim(line) != "z,value,variant,B,m") throw ConfigError("malformed curve header");
    GeneratorCurve c;
    bool first = true;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto toks = split_char(trim(line), ',');
        if (toks.size() != 5) throw ConfigError("malformed curve row: '" + line + "'");
        c.z.push_back(parse_double(toks[0], "z"));
        c.value.push_back(parse_double(toks[1], "value"));
        GeneratorVariant v = variant_from_name(toks[2]);
        int B = static_cast<int>(parse_int(toks[3], "B"));
        double m = parse_double(toks[4], "m");
        if (first) {
            c.variant = v;
            c.taylor_cap = B;
            c.weight_m = m;
            first = false;
        } else if (v != c.variant || B != c.taylor_cap || m != c.weight_m) {
            throw ConfigError("inconsistent metadata across curve rows");
        }
    }
    if (c.z.empty()) throw ConfigError("curve file has no rows");
    return c;
}

inline GeneratorCurve read_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "' for reading");
    return read_curve(in);
}

} // namespace genfun
