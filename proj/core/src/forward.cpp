#include "lcoc/forward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lcoc/errors.hpp"
#include "stencil.hpp"

namespace lcoc {

namespace {

void check_inputs(const ModelParams& params, const ControlSet& controls,
                  const BrownianPaths& paths, const SpaceTimeGrid& grid) {
    validate_params(params, grid);
    for (int c = 0; c < kControlCount; ++c) {
        require_frames(controls.field(c), grid, "controls");
    }
    controls.require_admissible();
    require_compatible_path(paths, params, grid);
}

void require_finite(const ScalarField& f, int step, const char* name) {
    if (!f.all_finite()) {
        throw SolverError(std::string("non-finite state ") + name, step);
    }
}

void floor_interior(ScalarField& f, const SpaceTimeGrid& grid) {
    for (int j = 1; j < grid.ny() - 1; ++j) {
        for (int i = 1; i < grid.nx() - 1; ++i) f(i, j) = std::max(f(i, j), 0.0);
    }
}

// Left-point reaction increments R1 + R and R2 - R over one frame.
void reaction_frames(const ScalarField& f1, const ScalarField& f2, const ControlSet& controls,
                     int k, const ModelParams& params, ScalarField& out1, ScalarField& out2) {
    const auto& b1 = controls.beta1()[k];
    const auto& b2 = controls.beta2()[k];
    const auto& s1 = controls.s1()[k];
    const auto& s2 = controls.s2()[k];
    for (std::size_t n = 0; n < f1.size(); ++n) {
        const auto r = reaction_terms(f1[n], f2[n], b1[n], b2[n], s1[n], s2[n], params);
        out1[n] = r.r1 + r.r;
        out2[n] = r.r2 - r.r;
    }
}

}  // namespace

std::string_view backend_name(ForwardBackend backend) {
    return backend == ForwardBackend::euler_maruyama ? "em" : "transformed";
}

ForwardBackend parse_backend(std::string_view name) {
    if (name == "em" || name == "euler-maruyama") return ForwardBackend::euler_maruyama;
    if (name == "transformed") return ForwardBackend::transformed;
    throw ValidationError("solver.backend: unknown backend '" + std::string(name) + "'");
}

void require_compatible_path(const BrownianPaths& paths, const ModelParams& params,
                             const SpaceTimeGrid& grid) {
    if (paths.nt() != grid.nt() || std::abs(paths.dt() - grid.dt()) > 1e-12 * grid.dt()) {
        throw ValidationError("Brownian path is sampled on " + std::to_string(paths.nt()) +
                              " steps but the grid has " + std::to_string(grid.nt()));
    }
    if (paths.n_modes() != params.modes.n_modes()) {
        throw ValidationError("Brownian path has " + std::to_string(paths.n_modes()) +
                              " modes but the model has " +
                              std::to_string(params.modes.n_modes()));
    }
}

StateTrajectory solve_forward_em(const ModelParams& params, const ControlSet& controls,
                                 const BrownianPaths& paths, const SpaceTimeGrid& grid) {
    check_inputs(params, controls, paths, grid);
    const double dt = grid.dt();
    const detail::DiffusionSolver solve1(grid, params.d1, dt);
    const detail::DiffusionSolver solve2(grid, params.d2, dt);

    StateTrajectory out{grid, {}, {}, paths.seed()};
    out.f1.reserve(grid.nt() + 1);
    out.f2.reserve(grid.nt() + 1);
    out.f1.push_back(params.f0_1);
    out.f2.push_back(params.f0_2);

    ScalarField react1(grid);
    ScalarField react2(grid);
    for (int k = 0; k < grid.nt(); ++k) {
        const ScalarField& f1 = out.f1.back();
        const ScalarField& f2 = out.f2.back();
        reaction_frames(f1, f2, controls, k, params, react1, react2);
        const ScalarField adv1 = advection_divergence(f1, params.vel1, grid);
        const ScalarField adv2 = advection_divergence(f2, params.vel2, grid);
        const ScalarField noise1 = mode_increment(params.modes.h1, paths, k);
        const ScalarField noise2 = mode_increment(params.modes.h2, paths, k);

        ScalarField g1(grid);
        ScalarField g2(grid);
        for (std::size_t n = 0; n < g1.size(); ++n) {
            g1[n] = f1[n] + dt * (react1[n] - adv1[n]) + f1[n] * noise1[n];
            g2[n] = f2[n] + dt * (react2[n] - adv2[n]) + f2[n] * noise2[n];
        }
        ScalarField next1 = solve1.solve(g1, params.fb_1[k + 1], k + 1);
        ScalarField next2 = solve2.solve(g2, params.fb_2[k + 1], k + 1);
        if (params.clip_negative) {
            floor_interior(next1, grid);
            floor_interior(next2, grid);
        }
        require_finite(next1, k + 1, "f1");
        require_finite(next2, k + 1, "f2");
        out.f1.push_back(std::move(next1));
        out.f2.push_back(std::move(next2));
    }
    return out;
}

StateTrajectory solve_forward_transformed(const ModelParams& params, const ControlSet& controls,
                                          const BrownianPaths& paths, const SpaceTimeGrid& grid) {
    check_inputs(params, controls, paths, grid);
    const double dt = grid.dt();
    const detail::DiffusionSolver solve1(grid, params.d1, dt);
    const detail::DiffusionSolver solve2(grid, params.d2, dt);
    const ScalarField sq1 = mode_square_sum(params.modes.h1, grid);
    const ScalarField sq2 = mode_square_sum(params.modes.h2, grid);

    StateTrajectory out{grid, {}, {}, paths.seed()};
    out.f1.reserve(grid.nt() + 1);
    out.f2.reserve(grid.nt() + 1);
    out.f1.push_back(params.f0_1);
    out.f2.push_back(params.f0_2);

    // B(0) = 0, so C starts at the initial data.
    ScalarField c1 = params.f0_1;
    ScalarField c2 = params.f0_2;
    ScalarField phi1 = mode_exponent(params.modes.h1, paths, 0);
    ScalarField phi2 = mode_exponent(params.modes.h2, paths, 0);

    ScalarField react1(grid);
    ScalarField react2(grid);
    for (int k = 0; k < grid.nt(); ++k) {
        reaction_frames(out.f1.back(), out.f2.back(), controls, k, params, react1, react2);
        const auto coeff1 = detail::transformed_coefficients(phi1, sq1, params.d1, grid);
        const auto coeff2 = detail::transformed_coefficients(phi2, sq2, params.d2, grid);
        const ScalarField op1 = detail::transformed_operator(coeff1, c1, params.d1, params.vel1, grid);
        const ScalarField op2 = detail::transformed_operator(coeff2, c2, params.d2, params.vel2, grid);

        ScalarField g1(grid);
        ScalarField g2(grid);
        for (std::size_t n = 0; n < g1.size(); ++n) {
            g1[n] = c1[n] + dt * (op1[n] + std::exp(-phi1[n]) * react1[n]);
            g2[n] = c2[n] + dt * (op2[n] + std::exp(-phi2[n]) * react2[n]);
        }
        // The modes vanish on the boundary, so C carries f^b there unchanged.
        c1 = solve1.solve(g1, params.fb_1[k + 1], k + 1);
        c2 = solve2.solve(g2, params.fb_2[k + 1], k + 1);
        if (params.clip_negative) {
            floor_interior(c1, grid);
            floor_interior(c2, grid);
        }

        phi1 = mode_exponent(params.modes.h1, paths, k + 1);
        phi2 = mode_exponent(params.modes.h2, paths, k + 1);
        ScalarField next1(grid);
        ScalarField next2(grid);
        for (std::size_t n = 0; n < next1.size(); ++n) {
            next1[n] = std::exp(phi1[n]) * c1[n];
            next2[n] = std::exp(phi2[n]) * c2[n];
        }
        require_finite(next1, k + 1, "f1");
        require_finite(next2, k + 1, "f2");
        out.f1.push_back(std::move(next1));
        out.f2.push_back(std::move(next2));
    }
    return out;
}

StateTrajectory solve_forward(ForwardBackend backend, const ModelParams& params,
                              const ControlSet& controls, const BrownianPaths& paths,
                              const SpaceTimeGrid& grid) {
    return backend == ForwardBackend::euler_maruyama
               ? solve_forward_em(params, controls, paths, grid)
               : solve_forward_transformed(params, controls, paths, grid);
}

}  // namespace lcoc
