#pragma once

#include <optional>
#include <vector>

#include "lcoc/adjoint.hpp"
#include "lcoc/controls.hpp"
#include "lcoc/forward.hpp"
#include "lcoc/grid.hpp"
#include "lcoc/model.hpp"
#include "lcoc/noise.hpp"

namespace lcoc {

/// Quadratic tracking cost: squared deviations of the controls from their
/// baselines/targets plus weighted squared deviations of the densities.
double evaluate_cost(const StateTrajectory& state, const ControlSet& controls,
                     const CostSpec& cost, const SpaceTimeGrid& grid);

/// Pointwise projection of (reference - G) onto the box of each control:
/// beta1 <- F(b1 - G1), beta2 <- F(b2 - G2), s1 <- F(r3 - G3), s2 <- F(r4 - G4).
ControlSet update_controls(const AdjointTrajectory& adjoint, const StateTrajectory& state,
                           const CostSpec& cost, const ControlSet& controls,
                           const ModelParams& params);

struct FbsOptions {
    double damping = 0.5;
    double tol = 1e-6;
    int max_iter = 500;
    ForwardBackend backend = ForwardBackend::transformed;
    /// Starting point; clamped baselines and targets when empty.
    std::optional<ControlSet> initial;
};

struct OptimizationReport {
    int iterations = 0;
    std::vector<double> cost_history;
    /// ||c - H(c)|| / (1 + ||c||) per sweep, before relaxation.
    std::vector<double> control_residual_history;
    /// ||c - H(c)|| in L2(Q_T) at exit.
    double kkt_residual = 0.0;
    /// kkt_residual / (1 + ||c||).
    double kkt_relative = 0.0;
    bool converged = false;
};

struct OptimizationResult {
    ControlSet controls;
    StateTrajectory state;
    AdjointTrajectory adjoint;
    OptimizationReport report;
};

/// Damped forward-backward sweep for the fixed point c = H(c): forward solve,
/// adjoint solve, projected update, relaxation c <- (1-d) c + d H(c). Stops
/// when the relative defect drops below tol; the returned controls, state
/// and adjoint always belong together. Non-convergence is reported, not
/// thrown.
OptimizationResult fbs_optimize(const ModelParams& params, const CostSpec& cost,
                                std::shared_ptr<const ControlBounds> bounds,
                                const BrownianPaths& paths, const SpaceTimeGrid& grid,
                                const FbsOptions& options = {});

struct GradientCheckEntry {
    double eps;
    double finite_difference;
    double relative_error;
};

struct GradientCheckReport {
    double adjoint_derivative = 0.0;
    std::vector<GradientCheckEntry> entries;
    double min_relative_error = 0.0;
};

/// Compares 2 int (c - ref + dz_g/dt) d over all four controls with central
/// differences (J(c + eps d) - J(c - eps d)) / (2 eps). The base control
/// must lie strictly inside its box and c +- eps d must stay admissible.
GradientCheckReport gradient_check(const ModelParams& params, const CostSpec& cost,
                                   const ControlSet& base, const BrownianPaths& paths,
                                   const SpaceTimeGrid& grid, const ControlSet& direction,
                                   const std::vector<double>& eps_list,
                                   ForwardBackend backend = ForwardBackend::transformed);

/// Smooth bounded perturbation direction used by the checks: each control
/// gets sin(pi x/lx) sin(pi y/ly) cos(pi t/T) times a per-control weight.
ControlSet smooth_direction(const SpaceTimeGrid& grid,
                            std::shared_ptr<const ControlBounds> bounds);

/// Per time level diagnostics of one path.
struct TimeSeries {
    std::vector<double> t;
    /// Running cost int_0^t, trapezoid in time.
    std::vector<double> cost;
    /// L2(Omega) norm of c(t) - H(c)(t) over all four controls.
    std::vector<double> residual;
    std::vector<double> mass_f1;
    std::vector<double> mass_f2;
};

TimeSeries time_series(const StateTrajectory& state, const AdjointTrajectory& adjoint,
                       const ControlSet& controls, const CostSpec& cost,
                       const SpaceTimeGrid& grid);

/// c + s * d, clamped into the box when `project` is set.
ControlSet shifted(const ControlSet& c, const ControlSet& d, double s, bool project = false);

}  // namespace lcoc
