#pragma once

#include <cstdint>
#include <string_view>

#include "lcoc/controls.hpp"
#include "lcoc/grid.hpp"
#include "lcoc/model.hpp"
#include "lcoc/noise.hpp"

namespace lcoc {

/// Densities f1, f2 at every node and time level of one sampled path.
struct StateTrajectory {
    SpaceTimeGrid grid;
    Frames f1;
    Frames f2;
    std::uint64_t seed = 0;
};

enum class ForwardBackend {
    /// Euler-Maruyama on the densities, multiplicative noise at the left point.
    euler_maruyama,
    /// Pathwise random PDE for exp(-sum h B) f, no stochastic integral.
    transformed,
};

std::string_view backend_name(ForwardBackend backend);
/// Accepts "em" / "euler-maruyama" / "transformed". Throws ValidationError.
ForwardBackend parse_backend(std::string_view name);

/// IMEX Euler-Maruyama: implicit diffusion, explicit advection and reaction,
/// noise f * sum_i h_i dB_i at the left endpoint, Dirichlet rows overwritten.
StateTrajectory solve_forward_em(const ModelParams& params, const ControlSet& controls,
                                 const BrownianPaths& paths, const SpaceTimeGrid& grid);

/// Substitutes f = exp(sum_i h_i B_i(t)) C and advances C with the same IMEX
/// split; the transformed drift and potential are frozen per step.
StateTrajectory solve_forward_transformed(const ModelParams& params, const ControlSet& controls,
                                          const BrownianPaths& paths, const SpaceTimeGrid& grid);

StateTrajectory solve_forward(ForwardBackend backend, const ModelParams& params,
                              const ControlSet& controls, const BrownianPaths& paths,
                              const SpaceTimeGrid& grid);

/// Throws ValidationError when a path does not live on the grid's time mesh
/// or carries a different number of modes than the model.
void require_compatible_path(const BrownianPaths& paths, const ModelParams& params,
                             const SpaceTimeGrid& grid);

}  // namespace lcoc
