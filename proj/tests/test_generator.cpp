// Weighted coefficient sums: agreement with a full-box oracle, exact values on
// preset data, the slope variant, the structural inequality checker, decay-rate
// fitting, and the curve CSV format.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "genfun/chebyshev.hpp"
#include "genfun/generator.hpp"
#include "genfun/initial_data.hpp"
#include "oracles.hpp"

using namespace genfun;
using Catch::Approx;

namespace {
const std::vector<double> kZ{0.0, 0.25, 0.5, 1.0};
}

TEST_CASE("periodic weighting matches the direct sum") {
    Rng rng(7);
    SECTION("one dimension") {
        const SpectralField f = random_scalar(1, 12, 1.0, 0.4, rng);
        const GeneratorCurve c = gen_fourier(f, kZ);
        for (size_t i = 0; i < kZ.size(); ++i)
            REQUIRE(c.value[i] == Approx(oracles::weighted_sum(f, kZ[i])).epsilon(1e-13));
    }
    SECTION("two dimensions, two components") {
        const SpectralField f = stack_fields({random_scalar(2, 6, 1.0, 0.4, rng),
                                              random_scalar(2, 6, 1.0, 0.4, rng)});
        const GeneratorCurve c = gen_fourier(f, kZ);
        for (size_t i = 0; i < kZ.size(); ++i)
            REQUIRE(c.value[i] == Approx(oracles::weighted_sum(f, kZ[i])).epsilon(1e-13));
    }
    SECTION("values are nondecreasing in z") {
        const SpectralField f = random_scalar(2, 6, 1.0, 0.4, rng);
        const GeneratorCurve c = gen_fourier(f, kZ);
        for (size_t i = 1; i < c.value.size(); ++i) REQUIRE(c.value[i] >= c.value[i - 1]);
    }
}

TEST_CASE("exact values on simple data") {
    SECTION("single sine mode sums to amp e^z") {
        const GeneratorCurve c = gen_fourier(preset_sine(8, 2.0), kZ);
        for (size_t i = 0; i < kZ.size(); ++i)
            REQUIRE(c.value[i] == Approx(2.0 * std::exp(kZ[i])).epsilon(1e-15));
    }
    SECTION("components combine in the Euclidean norm") {
        SpectralField f(2, 2, 2);
        f.at(Mode{1, 1}, 0) = Complex(3.0, 0.0);
        f.at(Mode{1, 1}, 1) = Complex(0.0, 4.0);
        const GeneratorCurve c = gen_fourier(f, {0.5});
        REQUIRE(c.value[0] == Approx(5.0 * std::exp(0.5 * std::sqrt(2.0))).epsilon(1e-15));
    }
}

TEST_CASE("slope variant is the exact z-derivative of the sum") {
    Rng rng(13);
    const SpectralField f = random_scalar(2, 8, 1.0, 0.4, rng);
    const GeneratorCurve d = gen_fourier_dz(f, kZ);
    SECTION("against the direct slope sum") {
        for (size_t i = 0; i < kZ.size(); ++i)
            REQUIRE(d.value[i] == Approx(oracles::weighted_slope(f, kZ[i])).epsilon(1e-13));
    }
    SECTION("against a central difference of the plain sum") {
        const double h = 1e-6;
        const GeneratorCurve up = gen_fourier(f, {0.5 + h});
        const GeneratorCurve dn = gen_fourier(f, {0.5 - h});
        const double fd = (up.value[0] - dn.value[0]) / (2.0 * h);
        const GeneratorCurve mid = gen_fourier_dz(f, {0.5});
        REQUIRE(mid.value[0] == Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("z-grid validation") {
    const SpectralField f = preset_sine(2);
    REQUIRE_THROWS_AS(gen_fourier(f, {-0.1, 0.5}), NegativeZ);
    REQUIRE_THROWS_AS(gen_fourier(f, {0.5, 0.5}), DomainMismatch);
    REQUIRE_THROWS_AS(gen_fourier(f, {}), DomainMismatch);
}

TEST_CASE("channel weighting sums collocation derivatives as a Taylor series") {
    ChebyshevGrid grid(33);
    const int B = 6;
    const SpectralField w = preset_shear(4, grid.nodes());
    const GeneratorCurve c = gen_mixed(w, kZ, B);
    // x-independent data with profile cos(pi y / 2): the k-th derivative has
    // sup norm (pi/2)^k, so the sum telescopes to the truncated exponential.
    // Repeated collocation differentiation amplifies roundoff by roughly the
    // matrix norm per order, which caps the achievable agreement near 1e-8.
    for (size_t i = 0; i < kZ.size(); ++i) {
        double want = 0.0, term = 1.0;
        for (int b = 0; b <= B; ++b) {
            want += term;
            term *= 0.5 * M_PI * kZ[i] / (b + 1);
        }
        REQUIRE(c.value[i] == Approx(want).epsilon(1e-6));
    }
    SECTION("cap and grid validation") {
        REQUIRE_THROWS_AS(gen_mixed(w, kZ, kTaylorCapLimit + 1), TaylorCapTooLarge);
        SpectralField bad(1, 4, 1, Transverse::chebyshev_y, {1.0, 0.3, -1.0});
        REQUIRE_THROWS_AS(gen_mixed(bad, kZ, 4), GridMismatch);
        REQUIRE_THROWS_AS(gen_mixed(preset_sine(4), kZ, 4), DimensionMismatch);
    }
}

TEST_CASE("phase-space weighting") {
    VelocityGrid grid(-8.0, 8.0, 129);
    const double m = 4.0;
    const SpectralField f = preset_perturbed_maxwellian(4, grid, 0.02);

    SECTION("zeroth order is the weighted sup norm per mode") {
        const std::vector<double> w = grid.weight(m);
        auto sup = [&](int k) {
            double s = 0.0;
            for (int j = 0; j < grid.n; ++j)
                s = std::max(s, w[j] * std::abs(f.coeff(Mode{k, 0}, 0, j)));
            return s;
        };
        const GeneratorCurve c = gen_kinetic(f, kZ, 0, m, grid);
        for (size_t i = 0; i < kZ.size(); ++i) {
            const double want =
                sup(0) + (sup(1) + sup(-1)) * std::exp(kZ[i]);
            REQUIRE(c.value[i] == Approx(want).epsilon(1e-13));
        }
    }
    SECTION("weight exponent must exceed dim + 2") {
        REQUIRE_THROWS_AS(gen_kinetic(f, kZ, 2, 3.0, grid), WeightTooSmall);
    }
    SECTION("weighted data must decay at the grid edge") {
        VelocityGrid narrow(-2.0, 2.0, 17);
        const SpectralField g = preset_perturbed_maxwellian(4, narrow, 0.02);
        REQUIRE_THROWS_AS(gen_kinetic(g, kZ, 2, m, narrow), GridNotDecayed);
    }
}

TEST_CASE("dispatch picks the weighting from the field kind") {
    Rng rng(19);
    const SpectralField a = random_scalar(1, 4, 1.0, 0.4, rng);
    REQUIRE(gen_curve(a, kZ).variant == GeneratorVariant::fourier);

    ChebyshevGrid grid(17);
    const SpectralField w = preset_shear(4, grid.nodes());
    REQUIRE(gen_curve(w, kZ, 6).variant == GeneratorVariant::mixed);

    VelocityGrid vg(-8.0, 8.0, 65);
    const SpectralField f = preset_perturbed_maxwellian(2, vg, 0.02);
    const GeneratorCurve k = gen_curve(f, kZ, 4, 4.0);
    REQUIRE(k.variant == GeneratorVariant::kinetic);
    REQUIRE(k.weight_m == 4.0);
}

TEST_CASE("membership report") {
    const SpectralField f = preset_sine(4);
    const SpaceMembership in = space_membership(f, 2.0);
    REQUIRE(in.finite);
    REQUIRE(in.value == Approx(std::exp(2.0)));
    // A huge radius overflows the exponential weight, so the sum is no longer
    // finite and the report must say so.
    const SpaceMembership out = space_membership(f, 1000.0);
    REQUIRE_FALSE(out.finite);
    REQUIRE_THROWS_AS(space_membership(f, -1.0), NegativeZ);
}

TEST_CASE("structural inequalities hold on random pairs") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const int dim = trial % 2 == 0 ? 1 : 2;
        const int N = dim == 1 ? 10 : 6;
        const SpectralField f = random_scalar(dim, N, 1.0, 0.5, rng);
        const SpectralField g = random_scalar(dim, N, 0.8, 0.4, rng);
        const CalculusReport rep = check_calculus(f, g, {0.0, 0.5, 1.0});
        REQUIRE(rep.pass);
        REQUIRE(rep.sum_slack_min >= -1e-12 * rep.scale);
        REQUIRE(rep.product_slack_min >= -1e-12 * rep.scale);
        REQUIRE(rep.time_slack_min >= -1e-12 * rep.scale);
        REQUIRE(rep.gradient_resid_max <= 1e-12);
    }
    SECTION("operand validation") {
        const SpectralField f = preset_sine(4);
        Rng r2(5);
        const SpectralField g = random_scalar(2, 4, 1.0, 0.4, r2);
        REQUIRE_THROWS_AS(check_calculus(f, g, {0.0, 1.0}), DimensionMismatch);
    }
}

TEST_CASE("decay-rate fit") {
    SECTION("recovers a planted rate exactly") {
        SpectralField f(2, 10);
        f.for_each_mode([&](const Mode& a, size_t idx) {
            *f.mode_ptr(idx, 0) = Complex(0.3 * std::exp(-0.65 * mode_l2(a)), 0.0);
        });
        const RadiusFit fit = radius_estimate(f);
        REQUIRE(fit.rho_hat == Approx(0.65).margin(1e-12));
        REQUIRE(fit.prefactor == Approx(0.3).epsilon(1e-12));
    }
    SECTION("too few usable coefficients") {
        const SpectralField tiny = make_field({{{1}, Complex(1.0, 0.0)}}, 1, 1);
        REQUIRE_THROWS_AS(radius_estimate(tiny), TooFewModes);
    }
    SECTION("tail prediction closed form") {
        const RadiusFit fit{0.5, 2.0, 10};
        const double q = std::exp(-0.5);
        REQUIRE(predicted_tail_l1(fit, 6) ==
                Approx(2.0 * 2.0 * std::pow(q, 7) / (1.0 - q)).epsilon(1e-15));
    }
}

TEST_CASE("curve CSV round trip") {
    Rng rng(29);
    const SpectralField f = random_scalar(1, 6, 1.0, 0.4, rng);
    const GeneratorCurve c = gen_fourier(f, kZ);

    std::stringstream ss;
    write_curve(ss, c);
    const GeneratorCurve back = read_curve(ss);
    REQUIRE(back.variant == c.variant);
    REQUIRE(back.z == c.z);
    REQUIRE(back.value == c.value);

    SECTION("metadata must be consistent across rows") {
        std::stringstream bad;
        bad << "z,value,variant,B,m\n0,1,fourier,0,0\n1,2,mixed,0,0\n";
        REQUIRE_THROWS_AS(read_curve(bad), ConfigError);
    }
    SECTION("header is required") {
        std::stringstream bad("0,1,fourier,0,0\n");
        REQUIRE_THROWS_AS(read_curve(bad), ConfigError);
    }
}
