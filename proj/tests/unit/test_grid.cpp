#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lcoc/errors.hpp"
#include "lcoc/grid.hpp"
#include "support.hpp"

using namespace lcoc;

TEST(Grid, RejectsDegenerateMeshes) {
    EXPECT_THROW(SpaceTimeGrid(2, 5, 1, 1, 10, 1), ValidationError);
    EXPECT_THROW(SpaceTimeGrid(5, 2, 1, 1, 10, 1), ValidationError);
    EXPECT_THROW(SpaceTimeGrid(5, 5, 1, 1, 0, 1), ValidationError);
    EXPECT_THROW(SpaceTimeGrid(5, 5, 0, 1, 10, 1), ValidationError);
    EXPECT_THROW(SpaceTimeGrid(5, 5, 1, -1, 10, 1), ValidationError);
    EXPECT_THROW(SpaceTimeGrid(5, 5, 1, 1, 10, 0), ValidationError);
}

TEST(Grid, SpacingCoversTheDomain) {
    const SpaceTimeGrid g(13, 7, 2.5, 0.3, 40, 3.0);
    EXPECT_NEAR(g.dx() * (g.nx() - 1), 2.5, 1e-14);
    EXPECT_NEAR(g.dy() * (g.ny() - 1), 0.3, 1e-15);
    EXPECT_NEAR(g.dt() * g.nt(), 3.0, 1e-14);
    EXPECT_EQ(g.index(3, 2), 2u * 13u + 3u);
    EXPECT_TRUE(g.is_boundary(0, 3));
    EXPECT_TRUE(g.is_boundary(12, 3));
    EXPECT_FALSE(g.is_boundary(1, 1));
}

TEST(Laplacian, VanishesOnAffineFields) {
    const SpaceTimeGrid g(11, 9, 1.0, 2.0, 1, 1.0);
    const auto f = sample_field(g, [](double x, double y) { return 0.3 * x - 1.7 * y + 0.25; });
    const auto lap = laplacian_dirichlet(f, 1.0, g);
    for (std::size_t n = 0; n < lap.size(); ++n) EXPECT_NEAR(lap[n], 0.0, 1e-11);
}

TEST(Laplacian, QuadraticGivesScaledConstant) {
    const SpaceTimeGrid g(9, 9, 1.0, 1.0, 1, 1.0);
    const auto f = sample_field(g, [](double x, double) { return x * x; });
    const auto lap = laplacian_dirichlet(f, 2.0, g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            if (g.is_boundary(i, j)) {
                EXPECT_EQ(lap(i, j), 0.0);
            } else {
                EXPECT_NEAR(lap(i, j), 4.0, 1e-11);
            }
        }
    }
}

TEST(Laplacian, MatchesIndependentStencilEvaluation) {
    const SpaceTimeGrid g(7, 7, 1.3, 0.9, 1, 1.0);
    std::mt19937_64 rng(7);
    const auto f = test::random_field(g, rng);
    const double d = 0.37;
    const auto lap = laplacian_dirichlet(f, d, g);

    // Flat-index walk in reverse order with neighbour offsets.
    const int nx = g.nx();
    const double cx = d / (g.dx() * g.dx());
    const double cy = d / (g.dy() * g.dy());
    std::vector<double> oracle(f.size(), 0.0);
    for (int n = static_cast<int>(f.size()) - 1; n >= 0; --n) {
        const int i = n % nx;
        const int j = n / nx;
        if (i == 0 || j == 0 || i == nx - 1 || j == g.ny() - 1) continue;
        oracle[n] = cx * (f[n + 1] - 2.0 * f[n] + f[n - 1]) +
                    cy * (f[n + nx] - 2.0 * f[n] + f[n - nx]);
    }
    for (std::size_t n = 0; n < f.size(); ++n) EXPECT_EQ(lap[n], oracle[n]) << "node " << n;

    // Dense matrix product, summed column by column.
    const std::size_t m = f.size();
    std::vector<double> a(m * m, 0.0);
    for (std::size_t n = 0; n < m; ++n) {
        const int i = static_cast<int>(n) % nx;
        const int j = static_cast<int>(n) / nx;
        if (i == 0 || j == 0 || i == nx - 1 || j == g.ny() - 1) continue;
        a[n * m + n] = -2.0 * (cx + cy);
        a[n * m + n + 1] = a[n * m + n - 1] = cx;
        a[n * m + n + nx] = a[n * m + n - nx] = cy;
    }
    for (std::size_t r = 0; r < m; ++r) {
        double s = 0.0;
        for (std::size_t col = 0; col < m; ++col) s += a[r * m + col] * f[col];
        EXPECT_NEAR(lap[r], s, 1e-11 * (1.0 + std::abs(s)));
    }
}

TEST(Laplacian, RejectsMismatchedField) {
    const SpaceTimeGrid g(7, 7, 1, 1, 1, 1);
    EXPECT_THROW(laplacian_dirichlet(ScalarField(6, 7), 1.0, g), ValidationError);
    EXPECT_THROW(laplacian_dirichlet(ScalarField(g), 0.0, g), ValidationError);
}

TEST(Advection, ZeroVelocityGivesZero) {
    const SpaceTimeGrid g(9, 9, 1, 1, 1, 1);
    std::mt19937_64 rng(1);
    const auto f = test::random_field(g, rng);
    const VelocityField v{ScalarField(g), ScalarField(g)};
    const auto div = advection_divergence(f, v, g);
    for (std::size_t n = 0; n < div.size(); ++n) EXPECT_EQ(div[n], 0.0);
}

TEST(Advection, ConstantFluxHasNoDivergence) {
    const SpaceTimeGrid g(9, 9, 1, 1, 1, 1);
    for (double u0 : {0.8, -0.8}) {
        const VelocityField v{ScalarField(g, u0), ScalarField(g)};
        const auto div = advection_divergence(ScalarField(g, 2.5), v, g);
        for (std::size_t n = 0; n < div.size(); ++n) EXPECT_EQ(div[n], 0.0);
    }
}

TEST(Advection, LinearProfileMatchesAnalyticDivergence) {
    const SpaceTimeGrid g(9, 9, 1, 1, 1, 1);
    const auto f = sample_field(g, [](double x, double) { return x; });
    const VelocityField v{ScalarField(g, 1.0), ScalarField(g)};
    const auto div = advection_divergence(f, v, g);
    for (int j = 1; j < g.ny() - 1; ++j) {
        for (int i = 1; i < g.nx() - 1; ++i) {
            // d/dx (1 * x) = 1; upwind is exact on linear data up to rounding.
            EXPECT_NEAR(div(i, j), 1.0, g.dx() * 1e-10);
        }
    }
}

TEST(Advection, FirstOrderOnSmoothData) {
    double previous = 0.0;
    for (int n : {17, 33, 65}) {
        const SpaceTimeGrid g(n, n, 1, 1, 1, 1);
        const auto f = sample_field(g, [](double x, double y) { return std::sin(x) * std::cos(y); });
        const auto v = VelocityField{sample_field(g, [](double x, double) { return 1.0 + x; }),
                                     ScalarField(g, -0.5)};
        const auto div = advection_divergence(f, v, g);
        double err = 0.0;
        for (int j = 1; j < n - 1; ++j) {
            for (int i = 1; i < n - 1; ++i) {
                const double x = g.x(i), y = g.y(j);
                const double exact = std::sin(x) * std::cos(y) + (1.0 + x) * std::cos(x) * std::cos(y) +
                                     0.5 * std::sin(x) * std::sin(y);
                err = std::max(err, std::abs(div(i, j) - exact));
            }
        }
        if (previous > 0.0) EXPECT_GT(previous / err, 1.8);
        previous = err;
    }
}

TEST(Operators, AreLinearInTheField) {
    const SpaceTimeGrid g(11, 8, 1.0, 0.7, 1, 1);
    std::mt19937_64 rng(11);
    const VelocityField v{test::random_field(g, rng), test::random_field(g, rng)};
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = test::random_field(g, rng);
        const auto b = test::random_field(g, rng);
        const double s = std::uniform_real_distribution<double>(-3, 3)(rng);
        const ScalarField combo = a + s * b;

        const auto lap = laplacian_dirichlet(combo, 0.2, g);
        const auto lap_sum = laplacian_dirichlet(a, 0.2, g) + s * laplacian_dirichlet(b, 0.2, g);
        const auto adv = advection_divergence(combo, v, g);
        const auto adv_sum = advection_divergence(a, v, g) + s * advection_divergence(b, v, g);
        for (std::size_t n = 0; n < lap.size(); ++n) {
            EXPECT_NEAR(lap[n], lap_sum[n], 1e-12 * (1.0 + std::abs(lap[n])) * 400);
            EXPECT_NEAR(adv[n], adv_sum[n], 1e-12 * (1.0 + std::abs(adv[n])) * 20);
        }
    }
}

TEST(Operators, AreBitwiseDeterministic) {
    const SpaceTimeGrid g(9, 9, 1, 1, 4, 1);
    std::mt19937_64 rng(5);
    const auto f = test::random_field(g, rng);
    const VelocityField v{test::random_field(g, rng), test::random_field(g, rng)};
    EXPECT_EQ(laplacian_dirichlet(f, 0.3, g), laplacian_dirichlet(f, 0.3, g));
    EXPECT_EQ(advection_divergence(f, v, g), advection_divergence(f, v, g));
    const Frames frames(5, f);
    EXPECT_EQ(integrate_space_time(frames, g), integrate_space_time(frames, g));
}

TEST(Quadrature, ConstantOneGivesMeasureOfCylinder) {
    const SpaceTimeGrid g(9, 13, 1.0, 1.0, 20, 2.0);
    EXPECT_NEAR(integrate_space_time(constant_frames(g, 1.0), g), 2.0, 1e-12);
}

TEST(Quadrature, ZeroGivesExactlyZero) {
    const SpaceTimeGrid g(9, 9, 1.0, 1.0, 20, 2.0);
    EXPECT_EQ(integrate_space_time(constant_frames(g, 0.0), g), 0.0);
}

TEST(Quadrature, TimeSquaredMatchesClosedForm) {
    const SpaceTimeGrid g(5, 5, 1.0, 1.0, 100, 1.0);
    const auto frames = sample_frames(g, [](double, double, double t) { return t * t; });
    const double value = integrate_space_time(frames, g);
    EXPECT_LT(std::abs(value - 1.0 / 3.0), 1e-3);
    // Trapezoid error for t^2 is exactly dt^2 T / 6.
    EXPECT_NEAR(value - 1.0 / 3.0, g.dt() * g.dt() / 6.0, 1e-14);
}

TEST(Quadrature, SpaceWeightsIntegrateBilinearExactly) {
    const SpaceTimeGrid g(7, 5, 2.0, 3.0, 1, 1.0);
    const auto f = sample_field(g, [](double x, double y) { return 1.0 + x + 2.0 * y + x * y; });
    // int_0^2 int_0^3 (1 + x + 2y + xy) dy dx = 6 + 6 + 18 + 9
    EXPECT_NEAR(integrate_space(f, g), 39.0, 1e-12);
}

TEST(Quadrature, NonNegativeIntegrandGivesNonNegativeValue) {
    const SpaceTimeGrid g(6, 7, 1.0, 2.0, 9, 1.5);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        Frames frames;
        for (int k = 0; k <= g.nt(); ++k) frames.push_back(test::random_field(g, rng, 0.0, 1.0));
        EXPECT_GE(integrate_space_time(frames, g), 0.0);
    }
}

TEST(Quadrature, RejectsWrongFrameCount) {
    const SpaceTimeGrid g(5, 5, 1, 1, 4, 1);
    EXPECT_THROW(integrate_space_time(Frames{}, g), ValidationError);
    EXPECT_THROW(integrate_space_time(Frames(4, ScalarField(g)), g), ValidationError);
}

TEST(Quadrature, L2DistanceOfShiftedConstant) {
    const SpaceTimeGrid g(5, 5, 1, 1, 4, 1);
    EXPECT_NEAR(l2_distance(constant_frames(g, 3.0), constant_frames(g, 1.0), g), 2.0, 1e-14);
    EXPECT_NEAR(l2_norm(constant_frames(g, -0.5), g), 0.5, 1e-15);
}
