#include "lcoc/adjoint.hpp"

#include <cmath>
#include <string>

#include "lcoc/errors.hpp"
#include "stencil.hpp"

namespace lcoc {

AdjointSources adjoint_sources(const StateTrajectory& state, int k, const ScalarField& z1,
                               const ScalarField& z2, const ControlSet& controls,
                               const CostSpec& cost, const ModelParams& params) {
    const SpaceTimeGrid& grid = state.grid;
    if (k < 0 || k > grid.nt()) throw ValidationError("adjoint_sources: time level out of range");
    require_on_grid(z1, grid, "adjoint_sources (z_f1)");
    require_on_grid(z2, grid, "adjoint_sources (z_f2)");

    const auto& f1 = state.f1[k];
    const auto& f2 = state.f2[k];
    const auto& b1 = controls.beta1()[k];
    const auto& b2 = controls.beta2()[k];
    const auto& s1 = controls.s1()[k];
    const auto& s2 = controls.s2()[k];
    const ScalarField transport1 = detail::advection_transpose(z1, params.vel1, grid);
    const ScalarField transport2 = detail::advection_transpose(z2, params.vel2, grid);
    const ScalarField sq1 = mode_square_sum(params.modes.h1, grid);
    const ScalarField sq2 = mode_square_sum(params.modes.h2, grid);

    AdjointSources out{ScalarField(grid), ScalarField(grid)};
    for (std::size_t n = 0; n < f1.size(); ++n) {
        const auto jac = reaction_jacobian(f1[n], f2[n], b1[n], b2[n], s1[n], s2[n], params);
        out.h1[n] = -(jac.dr1_df1 + jac.dr_df1) * z1[n] - (jac.dr2_df1 - jac.dr_df1) * z2[n] +
                    transport1[n] + cost.lambda1 * (f1[n] - cost.r1[k][n]) + z1[n] * sq1[n];
        out.h2[n] = -(jac.dr1_df2 + jac.dr_df2) * z1[n] - (jac.dr2_df2 - jac.dr_df2) * z2[n] +
                    transport2[n] + cost.lambda2 * (f2[n] - cost.r2[k][n]) + z2[n] * sq2[n];
    }
    return out;
}

AdjointTrajectory solve_adjoint(const StateTrajectory& state, const ControlSet& controls,
                                const CostSpec& cost, const ModelParams& params,
                                const BrownianPaths& paths, const SpaceTimeGrid& grid) {
    if (!(state.grid == grid)) throw ValidationError("solve_adjoint: state lives on another grid");
    if (state.seed != paths.seed()) {
        throw ValidationError("solve_adjoint: state was produced on another Brownian path");
    }
    require_frames(state.f1, grid, "solve_adjoint (f1)");
    require_frames(state.f2, grid, "solve_adjoint (f2)");
    for (int c = 0; c < kControlCount; ++c) require_frames(controls.field(c), grid, "controls");
    validate_cost(cost, grid);
    require_compatible_path(paths, params, grid);

    const int nt = grid.nt();
    const double dt = grid.dt();
    const detail::DiffusionSolver solve1(grid, params.d1, dt);
    const detail::DiffusionSolver solve2(grid, params.d2, dt);
    const ScalarField sq1 = mode_square_sum(params.modes.h1, grid);
    const ScalarField sq2 = mode_square_sum(params.modes.h2, grid);
    const ScalarField zero(grid);

    AdjointTrajectory out{grid, Frames(nt + 1, zero), Frames(nt + 1, zero), {}, {}};

    ScalarField zhat1(grid);
    ScalarField zhat2(grid);
    for (int k = nt; k >= 1; --k) {
        const ScalarField phi1 = mode_exponent(params.modes.h1, paths, k);
        const ScalarField phi2 = mode_exponent(params.modes.h2, paths, k);
        const ScalarField& z1 = out.z_f1[k];
        const ScalarField& z2 = out.z_f2[k];

        AdjointSources src = adjoint_sources(state, k, z1, z2, controls, cost, params);
        if (k == nt) {
            // z vanishes at T, so the sources are the tracking term alone; it
            // carries the half trapezoid weight of the last time level.
            src.h1 *= 0.5;
            src.h2 *= 0.5;
        }
        const ScalarField lap_z1 = laplacian_dirichlet(z1, params.d1, grid);
        const ScalarField lap_z2 = laplacian_dirichlet(z2, params.d2, grid);
        const ScalarField lap_zhat1 = laplacian_dirichlet(zhat1, params.d1, grid);
        const ScalarField lap_zhat2 = laplacian_dirichlet(zhat2, params.d2, grid);

        ScalarField g1(grid);
        ScalarField g2(grid);
        for (int j = 1; j < grid.ny() - 1; ++j) {
            for (int i = 1; i < grid.nx() - 1; ++i) {
                const double s1 = std::exp(phi1(i, j)) * (lap_z1(i, j) - src.h1(i, j)) -
                                  lap_zhat1(i, j) + 0.5 * sq1(i, j) * zhat1(i, j);
                const double s2 = std::exp(phi2(i, j)) * (lap_z2(i, j) - src.h2(i, j)) -
                                  lap_zhat2(i, j) + 0.5 * sq2(i, j) * zhat2(i, j);
                g1(i, j) = zhat1(i, j) + dt * s1;
                g2(i, j) = zhat2(i, j) + dt * s2;
            }
        }
        zhat1 = solve1.solve(g1, zero, k - 1);
        zhat2 = solve2.solve(g2, zero, k - 1);
        if (!zhat1.all_finite() || !zhat2.all_finite()) {
            throw SolverError("non-finite adjoint state", k - 1);
        }

        const ScalarField prev_phi1 = mode_exponent(params.modes.h1, paths, k - 1);
        const ScalarField prev_phi2 = mode_exponent(params.modes.h2, paths, k - 1);
        for (int j = 1; j < grid.ny() - 1; ++j) {
            for (int i = 1; i < grid.nx() - 1; ++i) {
                out.z_f1[k - 1](i, j) = std::exp(-prev_phi1(i, j)) * zhat1(i, j);
                out.z_f2[k - 1](i, j) = std::exp(-prev_phi2(i, j)) * zhat2(i, j);
            }
        }
    }

    for (int c = 0; c < kControlCount; ++c) {
        out.g_sources[c] = Frames(nt + 1, zero);
        out.z_g[c] = Frames(nt + 1, zero);
    }
    for (int k = 0; k < nt; ++k) {
        const double scale = dt / grid.time_weight(k);
        const auto& f1 = state.f1[k];
        const auto& f2 = state.f2[k];
        const auto& z1 = out.z_f1[k];
        const auto& z2 = out.z_f2[k];
        for (std::size_t n = 0; n < f1.size(); ++n) {
            const auto jac = reaction_jacobian(f1[n], f2[n], controls.beta1()[k][n],
                                               controls.beta2()[k][n], controls.s1()[k][n],
                                               controls.s2()[k][n], params);
            out.g_sources[0][k][n] = -scale * jac.dr1_dbeta1 * z1[n];
            out.g_sources[1][k][n] = -scale * jac.dr2_dbeta2 * z2[n];
            out.g_sources[2][k][n] = scale * (-jac.dr_ds1 * z1[n] + jac.dr_ds1 * z2[n]);
            out.g_sources[3][k][n] = scale * (-jac.dr_ds2 * z1[n] + jac.dr_ds2 * z2[n]);
        }
    }
    // Right-endpoint rule in reversed time: z_g(t_k) = z_g(t_{k+1}) - dt G(t_k).
    for (int c = 0; c < kControlCount; ++c) {
        for (int k = nt - 1; k >= 0; --k) {
            auto& zk = out.z_g[c][k];
            const auto& znext = out.z_g[c][k + 1];
            const auto& g = out.g_sources[c][k];
            for (std::size_t n = 0; n < zk.size(); ++n) zk[n] = znext[n] - dt * g[n];
        }
    }
    return out;
}

}  // namespace lcoc
