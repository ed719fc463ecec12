#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lcoc/adjoint.hpp"
#include "lcoc/config.hpp"
#include "lcoc/errors.hpp"
#include "lcoc/forward.hpp"
#include "stencil.hpp"
#include "support.hpp"

using namespace lcoc;

namespace {

struct Scenario {
    Problem problem;
    BrownianPaths paths;
    ControlSet controls;
    StateTrajectory state;
};

Scenario scenario(const RunConfig& c, std::uint64_t seed) {
    Problem problem = build_problem(c);
    auto paths = sample_brownian(seed, problem.params.modes.n_modes(), problem.grid);
    auto controls = initial_controls(problem.cost, problem.bounds);
    auto state = solve_forward_transformed(problem.params, controls, paths, problem.grid);
    return {std::move(problem), std::move(paths), std::move(controls), std::move(state)};
}

AdjointTrajectory adjoint_of(const Scenario& s) {
    return solve_adjoint(s.state, s.controls, s.problem.cost, s.problem.params, s.paths,
                         s.problem.grid);
}

StateTrajectory uniform_state(const SpaceTimeGrid& g, double f1, double f2, std::uint64_t seed) {
    return {g, Frames(g.nt() + 1, ScalarField(g, f1)), Frames(g.nt() + 1, ScalarField(g, f2)), seed};
}

RunConfig uniform_config(int nt, double t_final) {
    RunConfig c = test::small_config(9, nt);
    c.t_final = t_final;
    c.d1 = c.d2 = 1e-8;
    c.advection1 = c.advection2 = AdvectionSpec{};
    c.amplitude = 0.0;
    c.alpha = 1.31;
    c.k = 0.05;
    test::set_constant(c.f1, 1.0);
    test::set_constant(c.f2, 0.5);
    test::set_constant(c.b1, 0.5);
    test::set_constant(c.b2, 0.4);
    test::set_constant(c.r3, 0.6);
    test::set_constant(c.r4, 0.3);
    test::set_constant(c.r1, 2.0);
    test::set_constant(c.r2, 1.0);
    c.lambda1 = 1.0;
    c.lambda2 = 0.5;
    return c;
}

}  // namespace

TEST(AdjointSources, VanishAtTargetsWithZeroAdjoint) {
    const auto s = scenario(test::small_config(), 3);
    const auto& g = s.problem.grid;
    const auto state = uniform_state(g, 2.0, 1.5, 3);
    const ScalarField zero(g);
    // Demo targets are r1 = 2, r2 = 1.5.
    const auto h = adjoint_sources(state, 4, zero, zero, s.controls, s.problem.cost, s.problem.params);
    EXPECT_EQ(h.h1.max_abs(), 0.0);
    EXPECT_EQ(h.h2.max_abs(), 0.0);
}

TEST(AdjointSources, VanishWithoutTrackingWeight) {
    auto c = test::small_config();
    c.lambda1 = c.lambda2 = 0.0;
    const auto s = scenario(c, 3);
    const ScalarField zero(s.problem.grid);
    const auto h = adjoint_sources(s.state, 7, zero, zero, s.controls, s.problem.cost, s.problem.params);
    EXPECT_EQ(h.h1.max_abs(), 0.0);
    EXPECT_EQ(h.h2.max_abs(), 0.0);
}

TEST(AdjointSources, ScalarAssemblyMatchesHandComputation) {
    auto c = uniform_config(10, 1.0);
    c.alpha = 1.0;
    c.k = 0.1;
    const auto s = scenario(c, 0);
    const auto& g = s.problem.grid;
    const double f1 = 1.7, f2 = 2.2, z1 = 0.3, z2 = -0.45;
    const auto state = uniform_state(g, f1, f2, 0);
    const auto h = adjoint_sources(state, 5, ScalarField(g, z1), ScalarField(g, z2), s.controls,
                                   s.problem.cost, s.problem.params);

    const double b1 = 0.5, b2 = 0.4, s1 = 0.6, s2 = 0.3, k = 0.1, n = 10.0;
    const double logistic = 1.0 - (f1 + f2) / n;
    // alpha = 1: R = k (s1 - s2) f1 f2.
    const double dr_df1 = k * (s1 - s2) * f2;
    const double dr_df2 = k * (s1 - s2) * f1;
    const double h1 = -(b1 * (logistic - f1 / n) + dr_df1) * z1 - (-b2 * f2 / n - dr_df1) * z2 +
                      1.0 * (f1 - 2.0);
    const double h2 = -(-b1 * f1 / n + dr_df2) * z1 - (b2 * (logistic - f2 / n) - dr_df2) * z2 +
                      0.5 * (f2 - 1.0);
    EXPECT_NEAR(h.h1(4, 4), h1, 1e-12);
    EXPECT_NEAR(h.h2(4, 4), h2, 1e-12);
}

TEST(Adjoint, ZeroSourceGivesZeroAdjoint) {
    auto c = test::small_config();
    c.lambda1 = c.lambda2 = 0.0;
    const auto s = scenario(c, 5);
    const auto a = adjoint_of(s);
    for (int k = 0; k <= s.problem.grid.nt(); ++k) {
        EXPECT_EQ(a.z_f1[k].max_abs(), 0.0);
        EXPECT_EQ(a.z_f2[k].max_abs(), 0.0);
        for (int q = 0; q < kControlCount; ++q) EXPECT_EQ(a.z_g[q][k].max_abs(), 0.0);
    }
}

TEST(Adjoint, StateAtTargetsGivesZeroAdjoint) {
    auto c = test::small_config();
    c.lambda1 = c.lambda2 = 0.0;
    const auto s = scenario(c, 5);
    const auto& g = s.problem.grid;
    const auto state = uniform_state(g, 2.0, 1.5, 5);
    const auto a = solve_adjoint(state, s.controls, s.problem.cost, s.problem.params, s.paths, g);
    for (int k = 0; k <= g.nt(); ++k) {
        EXPECT_EQ(a.z_f1[k].max_abs(), 0.0);
        EXPECT_EQ(a.z_f2[k].max_abs(), 0.0);
        for (int q = 0; q < kControlCount; ++q) EXPECT_EQ(a.z_g[q][k].max_abs(), 0.0);
    }
}

TEST(Adjoint, TerminalAndBoundaryConditionsHold) {
    const auto s = scenario(test::small_config(11, 50), 21);
    const auto a = adjoint_of(s);
    const auto& g = s.problem.grid;
    EXPECT_GT(a.z_f1[0].max_abs(), 1e-3);
    EXPECT_EQ(a.z_f1[g.nt()].max_abs(), 0.0);
    EXPECT_EQ(a.z_f2[g.nt()].max_abs(), 0.0);
    for (int q = 0; q < kControlCount; ++q) EXPECT_EQ(a.z_g[q][g.nt()].max_abs(), 0.0);
    for (int k = 0; k <= g.nt(); ++k) {
        EXPECT_TRUE(a.z_f1[k].all_finite());
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                if (!g.is_boundary(i, j)) continue;
                EXPECT_EQ(a.z_f1[k](i, j), 0.0);
                EXPECT_EQ(a.z_f2[k](i, j), 0.0);
            }
        }
    }
}

TEST(Adjoint, ControlAdjointsIntegrateStoredSources) {
    const auto s = scenario(test::small_config(9, 40), 8);
    const auto a = adjoint_of(s);
    const auto& g = s.problem.grid;
    for (int q = 0; q < kControlCount; ++q) {
        for (int k = 0; k < g.nt(); ++k) {
            for (std::size_t n = 0; n < a.z_g[q][k].size(); ++n) {
                const double slope = (a.z_g[q][k + 1][n] - a.z_g[q][k][n]) / g.dt();
                const double scale = 1.0 + std::abs(a.z_g[q][k][n]) / g.dt();
                EXPECT_NEAR(slope, a.g_sources[q][k][n], 1e-13 * scale);
            }
        }
    }
}

TEST(Adjoint, UniformProblemMatchesBackwardOdeOracle) {
    const auto c = uniform_config(2000, 1.0);
    const auto s = scenario(c, 0);
    const auto a = adjoint_of(s);

    // Independent reduced model: f' = (R1 + R, R2 - R), then
    // z' = -(dF/df)^T z + lambda (f - r), z(T) = 0, both by RK4.
    const double b1 = 0.5, b2 = 0.4, s1 = 0.6, s2 = 0.3, k = 0.05, al = 1.31, n = 10.0;
    auto rhs_f = [&](double f1, double f2, double& d1, double& d2) {
        const double lg = 1.0 - (f1 + f2) / n;
        const double r = k * (s1 * std::pow(f1, al) * f2 - s2 * f1 * std::pow(f2, al));
        d1 = b1 * f1 * lg + r;
        d2 = b2 * f2 * lg - r;
    };
    const int steps = 20000;
    const double h = 1.0 / steps;
    std::vector<double> f1(2 * steps + 1), f2(2 * steps + 1);
    f1[0] = 1.0;
    f2[0] = 0.5;
    for (int i = 0; i < 2 * steps; ++i) {
        const double hh = h / 2;
        double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
        rhs_f(f1[i], f2[i], k1a, k1b);
        rhs_f(f1[i] + hh / 2 * k1a, f2[i] + hh / 2 * k1b, k2a, k2b);
        rhs_f(f1[i] + hh / 2 * k2a, f2[i] + hh / 2 * k2b, k3a, k3b);
        rhs_f(f1[i] + hh * k3a, f2[i] + hh * k3b, k4a, k4b);
        f1[i + 1] = f1[i] + hh / 6 * (k1a + 2 * k2a + 2 * k3a + k4a);
        f2[i + 1] = f2[i] + hh / 6 * (k1b + 2 * k2b + 2 * k3b + k4b);
    }
    auto rhs_z = [&](int idx, double z1, double z2, double& d1, double& d2) {
        const double x1 = f1[idx], x2 = f2[idx];
        const double lg = 1.0 - (x1 + x2) / n;
        const double a11 = b1 * (lg - x1 / n) + k * (s1 * al * std::pow(x1, al - 1) * x2 - s2 * std::pow(x2, al));
        const double a12 = -b1 * x1 / n + k * (s1 * std::pow(x1, al) - s2 * x1 * al * std::pow(x2, al - 1));
        const double dr_df1 = k * (s1 * al * std::pow(x1, al - 1) * x2 - s2 * std::pow(x2, al));
        const double dr_df2 = k * (s1 * std::pow(x1, al) - s2 * x1 * al * std::pow(x2, al - 1));
        const double a21 = -b2 * x2 / n - dr_df1;
        const double a22 = b2 * (lg - x2 / n) - dr_df2;
        d1 = -a11 * z1 - a21 * z2 + 1.0 * (x1 - 2.0);
        d2 = -a12 * z1 - a22 * z2 + 0.5 * (x2 - 1.0);
    };
    std::vector<double> z1(steps + 1, 0.0), z2(steps + 1, 0.0);
    for (int i = steps; i > 0; --i) {
        const int hi = 2 * i, mid = 2 * i - 1, lo = 2 * i - 2;
        double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
        rhs_z(hi, z1[i], z2[i], k1a, k1b);
        rhs_z(mid, z1[i] - h / 2 * k1a, z2[i] - h / 2 * k1b, k2a, k2b);
        rhs_z(mid, z1[i] - h / 2 * k2a, z2[i] - h / 2 * k2b, k3a, k3b);
        rhs_z(lo, z1[i] - h * k3a, z2[i] - h * k3b, k4a, k4b);
        z1[i - 1] = z1[i] - h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a);
        z2[i - 1] = z2[i] - h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b);
    }

    const int nt = s.problem.grid.nt();
    EXPECT_LT(std::abs(s.state.f1[nt](4, 4) - f1.back()) / f1.back(), 1e-3);
    for (int level : {0, nt / 4, nt / 2}) {
        const int idx = level * (steps / nt);
        EXPECT_LT(std::abs(a.z_f1[level](4, 4) - z1[idx]) / std::abs(z1[idx]), 1e-3) << level;
        EXPECT_LT(std::abs(a.z_f2[level](4, 4) - z2[idx]) / std::abs(z2[idx]), 1e-3) << level;
    }
}

TEST(Adjoint, LinearInTrackingWeightWithFrozenReaction) {
    auto c = test::small_config(9, 40);
    c.k = 0.0;
    test::set_box(c, 0.0, 1.0);
    test::set_constant(c.b1, 0.0);
    test::set_constant(c.b2, 0.0);
    const auto s = scenario(c, 13);
    const auto a = adjoint_of(s);
    CostSpec doubled = s.problem.cost;
    doubled.lambda1 *= 2.0;
    doubled.lambda2 *= 2.0;
    const auto b = solve_adjoint(s.state, s.controls, doubled, s.problem.params, s.paths, s.problem.grid);
    double scale = 0.0;
    for (const auto& f : a.z_f1) scale = std::max(scale, f.max_abs());
    ASSERT_GT(scale, 1e-3);
    for (int k = 0; k <= s.problem.grid.nt(); ++k) {
        for (std::size_t n = 0; n < a.z_f1[k].size(); ++n) {
            EXPECT_NEAR(b.z_f1[k][n], 2.0 * a.z_f1[k][n], 1e-8 * scale);
            EXPECT_NEAR(b.z_f2[k][n], 2.0 * a.z_f2[k][n], 1e-8 * scale);
        }
    }
}

TEST(Adjoint, TransportIsTheTransposeOfUpwindAdvection) {
    const SpaceTimeGrid g(10, 8, 1.0, 0.7, 1, 1);
    std::mt19937_64 rng(31);
    const VelocityField v{test::random_field(g, rng), test::random_field(g, rng)};
    for (int trial = 0; trial < 10; ++trial) {
        const auto f = test::zero_boundary(test::random_field(g, rng), g);
        const auto z = test::zero_boundary(test::random_field(g, rng), g);
        const auto af = advection_divergence(f, v, g);
        const auto atz = detail::advection_transpose(z, v, g);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t n = 0; n < f.size(); ++n) {
            lhs += af[n] * z[n];
            rhs += f[n] * atz[n];
        }
        EXPECT_NEAR(lhs, rhs, 1e-11 * (1.0 + std::abs(lhs)));
    }
}

TEST(Adjoint, RejectsMismatchedStateOrPath) {
    const auto s = scenario(test::small_config(), 4);
    const auto& g = s.problem.grid;
    const auto other_path = sample_brownian(5, 2, g);
    EXPECT_THROW(solve_adjoint(s.state, s.controls, s.problem.cost, s.problem.params, other_path, g),
                 ValidationError);
    const auto coarse = g.with_time_steps(20);
    EXPECT_THROW(solve_adjoint(s.state, s.controls, s.problem.cost, s.problem.params, s.paths, coarse),
                 ValidationError);
}
