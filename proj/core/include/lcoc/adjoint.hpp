#pragma once

#include <array>

#include "lcoc/controls.hpp"
#include "lcoc/forward.hpp"
#include "lcoc/grid.hpp"
#include "lcoc/model.hpp"
#include "lcoc/noise.hpp"

namespace lcoc {

/// The six adjoint states of one path. z_g[c] pairs with control c
/// (beta1, beta2, s1, s2) and g_sources[c] holds dz_g[c]/dt per time level.
struct AdjointTrajectory {
    SpaceTimeGrid grid;
    Frames z_f1;
    Frames z_f2;
    std::array<Frames, kControlCount> z_g;
    std::array<Frames, kControlCount> g_sources;
};

struct AdjointSources {
    ScalarField h1;
    ScalarField h2;
};

/// Sources of the two backward parabolic equations at time level `k`:
///
///   H1 = -d(R1+R)/df1 z1 - d(R2-R)/df1 z2 - grad(z1).F1 + lambda1 (f1 - r1) + z1 sum h_{i,1}^2
///
/// and symmetrically H2. The transport term is the transpose of the upwind
/// advection stencil, so the discrete backward sweep is the exact adjoint of
/// the forward one.
AdjointSources adjoint_sources(const StateTrajectory& state, int k, const ScalarField& z1,
                               const ScalarField& z2, const ControlSet& controls,
                               const CostSpec& cost, const ModelParams& params);

/// Backward sweep for z_f1, z_f2 through z_f = exp(-sum h B) Zhat, followed
/// by z_g(t) = -int_t^T G ds. Terminal data and boundary values are zero.
///
/// The sweep is the discrete transpose of solve_forward_transformed, so
/// 2 * int (c - ref + G) dc reproduces the derivative of evaluate_cost for
/// that backend up to solver tolerance. At t = 0 the stored G carries the
/// factor dt / (dt/2) of the half trapezoid cell.
AdjointTrajectory solve_adjoint(const StateTrajectory& state, const ControlSet& controls,
                                const CostSpec& cost, const ModelParams& params,
                                const BrownianPaths& paths, const SpaceTimeGrid& grid);

}  // namespace lcoc
