// Collocation grid on [-1, 1]: node layout, differentiation matrices checked
// on polynomials, the embedded two-point boundary solve against analytic
// solutions, and the dense helpers.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "genfun/chebyshev.hpp"
#include "oracles.hpp"

using namespace genfun;
using Catch::Approx;

TEST_CASE("node layout") {
    ChebyshevGrid grid(9);
    REQUIRE(grid.size() == 9);
    REQUIRE(grid.nodes().front() == Approx(1.0));
    REQUIRE(grid.nodes().back() == Approx(-1.0));
    for (int j = 0; j < 9; ++j)
        REQUIRE(grid.nodes()[j] == Approx(std::cos(M_PI * j / 8.0)).margin(1e-15));
    REQUIRE(ChebyshevGrid::matches(grid.nodes()));

    std::vector<double> off = grid.nodes();
    off[3] += 1e-6;
    REQUIRE_FALSE(ChebyshevGrid::matches(off));
    REQUIRE_FALSE(ChebyshevGrid::matches({0.0}));
    REQUIRE_THROWS_AS(ChebyshevGrid(1), GridTooCoarse);
}

TEST_CASE("differentiation is exact on polynomials") {
    ChebyshevGrid grid(12);
    const int n = grid.size();
    std::vector<double> p(n), dp(n), d2p(n);
    for (int j = 0; j < n; ++j) {
        const double y = grid.nodes()[j];
        p[j] = y * y * y * y - 2.0 * y * y + y;
        dp[j] = 4.0 * y * y * y - 4.0 * y + 1.0;
        d2p[j] = 12.0 * y * y - 4.0;
    }
    for (int i = 0; i < n; ++i) {
        double d1 = 0.0, d2 = 0.0;
        for (int j = 0; j < n; ++j) {
            d1 += grid.diff()[i * n + j] * p[j];
            d2 += grid.diff2()[i * n + j] * p[j];
        }
        REQUIRE(d1 == Approx(dp[i]).margin(1e-10));
        REQUIRE(d2 == Approx(d2p[i]).margin(1e-9));
    }
}

TEST_CASE("boundary value solve reproduces analytic solutions") {
    ChebyshevGrid grid(33);
    const int n = grid.size();
    const std::vector<double>& S = grid.dirichlet_solve();

    SECTION("constant forcing") {
        // phi'' = 1, phi(+-1) = 0 has phi = (y^2 - 1) / 2.
        for (int i = 0; i < n; ++i) {
            double phi = 0.0;
            for (int j = 0; j < n; ++j) phi += S[i * n + j];
            REQUIRE(phi == Approx(oracles::channel_solution_const(grid.nodes()[i]))
                               .margin(1e-10));
        }
    }
    SECTION("linear forcing") {
        // phi'' = y, phi(+-1) = 0 has phi = (y^3 - y) / 6.
        for (int i = 0; i < n; ++i) {
            double phi = 0.0;
            for (int j = 0; j < n; ++j) phi += S[i * n + j] * grid.nodes()[j];
            REQUIRE(phi == Approx(oracles::channel_solution_linear(grid.nodes()[i]))
                               .margin(1e-10));
        }
    }
    SECTION("boundary rows vanish") {
        for (int j = 0; j < n; ++j) {
            REQUIRE(S[j] == 0.0);
            REQUIRE(S[(n - 1) * n + j] == 0.0);
        }
    }
    SECTION("solve then differentiate twice returns the forcing inside") {
        std::vector<double> w(n);
        for (int j = 0; j < n; ++j) w[j] = std::sin(2.0 * grid.nodes()[j]);
        std::vector<double> phi(n, 0.0), d2(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) phi[i] += S[i * n + j] * w[j];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) d2[i] += grid.diff2()[i * n + j] * phi[j];
        for (int i = 1; i < n - 1; ++i) REQUIRE(d2[i] == Approx(w[i]).margin(1e-8));
    }
}

TEST_CASE("dense helpers") {
    SECTION("inverse of a small matrix") {
        const std::vector<double> m{2.0, 0.0, 1.0, 1.0};
        const std::vector<double> inv = invert_dense(m, 2);
        REQUIRE(inv[0] == Approx(0.5));
        REQUIRE(inv[1] == Approx(0.0));
        REQUIRE(inv[2] == Approx(-0.5));
        REQUIRE(inv[3] == Approx(1.0));
    }
    SECTION("singular input throws") {
        REQUIRE_THROWS_AS(invert_dense({1.0, 2.0, 2.0, 4.0}, 2), SingularSystem);
    }
    SECTION("matmul and norm") {
        const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
        const std::vector<double> b{0.0, 1.0, 1.0, 0.0};
        const std::vector<double> c = matmul(a, b, 2);
        REQUIRE(c == std::vector<double>{2.0, 1.0, 4.0, 3.0});
        REQUIRE(norm_inf(a, 2) == Approx(7.0));
    }
}

TEST_CASE("channel solve validates its input") {
    ChebyshevGrid grid(9);
    SpectralField w(1, 2, 1, Transverse::chebyshev_y, grid.nodes());
    for (int j = 0; j < grid.size(); ++j) w.at(Mode{0, 0}, 0, j) = Complex(1.0, 0.0);

    const SpectralField phi = poisson_channel_solve(w, grid);
    for (int j = 0; j < grid.size(); ++j)
        REQUIRE(phi.coeff(Mode{0, 0}, 0, j).real() ==
                Approx(oracles::channel_solution_const(grid.nodes()[j])).margin(1e-10));

    SECTION("wrong node family") {
        SpectralField v(1, 2, 1, Transverse::grid_v, grid.nodes());
        REQUIRE_THROWS_AS(poisson_channel_solve(v, grid), DimensionMismatch);
        ChebyshevGrid other(11);
        REQUIRE_THROWS_AS(poisson_channel_solve(w, other), GridMismatch);
    }
}
