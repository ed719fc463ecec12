#include "lcoc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lcoc/errors.hpp"

namespace lcoc {

double evaluate_cost(const StateTrajectory& state, const ControlSet& controls,
                     const CostSpec& cost, const SpaceTimeGrid& grid) {
    require_frames(state.f1, grid, "evaluate_cost (f1)");
    require_frames(state.f2, grid, "evaluate_cost (f2)");
    for (int c = 0; c < kControlCount; ++c) require_frames(controls.field(c), grid, "controls");
    validate_cost(cost, grid);

    Frames integrand(grid.nt() + 1, ScalarField(grid));
    for (int k = 0; k <= grid.nt(); ++k) {
        auto& out = integrand[k];
        for (std::size_t n = 0; n < out.size(); ++n) {
            double v = 0.0;
            for (int c = 0; c < kControlCount; ++c) {
                const double d = controls.field(c)[k][n] - cost.reference(c)[k][n];
                v += d * d;
            }
            const double e1 = state.f1[k][n] - cost.r1[k][n];
            const double e2 = state.f2[k][n] - cost.r2[k][n];
            out[n] = v + cost.lambda1 * e1 * e1 + cost.lambda2 * e2 * e2;
        }
    }
    return integrate_space_time(integrand, grid);
}

ControlSet update_controls(const AdjointTrajectory& adjoint, const StateTrajectory& state,
                           const CostSpec& cost, const ControlSet& controls,
                           const ModelParams& /*params*/) {
    const SpaceTimeGrid& grid = adjoint.grid;
    if (!(state.grid == grid)) throw ValidationError("update_controls: grid mismatch");
    const ControlBounds& box = controls.bounds();
    std::array<Frames, kControlCount> next;
    for (int c = 0; c < kControlCount; ++c) {
        next[c] = Frames(grid.nt() + 1, ScalarField(grid));
        for (int k = 0; k <= grid.nt(); ++k) {
            const auto& ref = cost.reference(c)[k];
            const auto& g = adjoint.g_sources[c][k];
            auto& out = next[c][k];
            for (std::size_t n = 0; n < out.size(); ++n) {
                out[n] = clamp(ref[n] - g[n], box.lower[c][k][n], box.upper[c][k][n]);
            }
        }
    }
    return ControlSet(std::move(next), controls.shared_bounds());
}

ControlSet shifted(const ControlSet& c, const ControlSet& d, double s, bool project) {
    ControlSet out = c;
    const ControlBounds& box = c.bounds();
    for (int i = 0; i < kControlCount; ++i) {
        for (std::size_t k = 0; k < out.field(i).size(); ++k) {
            auto& v = out.field(i)[k];
            const auto& dv = d.field(i)[k];
            for (std::size_t n = 0; n < v.size(); ++n) {
                v[n] += s * dv[n];
                if (project) v[n] = clamp(v[n], box.lower[i][k][n], box.upper[i][k][n]);
            }
        }
    }
    return out;
}

namespace {

ControlSet relax(const ControlSet& current, const ControlSet& proposal, double damping) {
    ControlSet out = current;
    const ControlBounds& box = current.bounds();
    for (int c = 0; c < kControlCount; ++c) {
        for (std::size_t k = 0; k < out.field(c).size(); ++k) {
            auto& v = out.field(c)[k];
            const auto& p = proposal.field(c)[k];
            for (std::size_t n = 0; n < v.size(); ++n) {
                // Rounding of the convex combination must not leave the box.
                v[n] = clamp((1.0 - damping) * v[n] + damping * p[n], box.lower[c][k][n],
                             box.upper[c][k][n]);
            }
        }
    }
    return out;
}

}  // namespace

OptimizationResult fbs_optimize(const ModelParams& params, const CostSpec& cost,
                                std::shared_ptr<const ControlBounds> bounds,
                                const BrownianPaths& paths, const SpaceTimeGrid& grid,
                                const FbsOptions& options) {
    if (!(options.damping > 0.0 && options.damping <= 1.0)) {
        throw ValidationError("optimizer.damping: must lie in (0, 1]");
    }
    if (!(options.tol > 0.0)) throw ValidationError("optimizer.tol: must be > 0");
    if (options.max_iter < 1) throw ValidationError("optimizer.max_iter: must be >= 1");
    validate_bounds(*bounds, grid);
    validate_cost(cost, grid);

    ControlSet c = options.initial ? *options.initial : initial_controls(cost, bounds);
    c.require_admissible();

    OptimizationReport report;
    for (int it = 1;; ++it) {
        StateTrajectory state = solve_forward(options.backend, params, c, paths, grid);
        AdjointTrajectory adjoint = solve_adjoint(state, c, cost, params, paths, grid);
        ControlSet proposal = update_controls(adjoint, state, cost, c, params);

        const double defect = control_distance(c, proposal, grid);
        const double relative = defect / (1.0 + control_norm(c, grid));
        report.iterations = it;
        report.cost_history.push_back(evaluate_cost(state, c, cost, grid));
        report.control_residual_history.push_back(relative);
        report.kkt_residual = defect;
        report.kkt_relative = relative;

        if (relative < options.tol || it >= options.max_iter) {
            report.converged = relative < options.tol;
            return {std::move(c), std::move(state), std::move(adjoint), std::move(report)};
        }
        c = relax(c, proposal, options.damping);
    }
}

TimeSeries time_series(const StateTrajectory& state, const AdjointTrajectory& adjoint,
                       const ControlSet& controls, const CostSpec& cost,
                       const SpaceTimeGrid& grid) {
    const ControlSet proposal = update_controls(adjoint, state, cost, controls, ModelParams{});
    TimeSeries out;
    double running = 0.0;
    double previous = 0.0;
    for (int k = 0; k <= grid.nt(); ++k) {
        ScalarField density(grid);
        ScalarField defect(grid);
        for (std::size_t n = 0; n < density.size(); ++n) {
            double v = 0.0;
            double r = 0.0;
            for (int c = 0; c < kControlCount; ++c) {
                const double d = controls.field(c)[k][n] - cost.reference(c)[k][n];
                const double e = controls.field(c)[k][n] - proposal.field(c)[k][n];
                v += d * d;
                r += e * e;
            }
            const double e1 = state.f1[k][n] - cost.r1[k][n];
            const double e2 = state.f2[k][n] - cost.r2[k][n];
            density[n] = v + cost.lambda1 * e1 * e1 + cost.lambda2 * e2 * e2;
            defect[n] = r;
        }
        const double current = integrate_space(density, grid);
        if (k > 0) running += 0.5 * grid.dt() * (previous + current);
        previous = current;
        out.t.push_back(grid.t(k));
        out.cost.push_back(running);
        out.residual.push_back(std::sqrt(integrate_space(defect, grid)));
        out.mass_f1.push_back(integrate_space(state.f1[k], grid));
        out.mass_f2.push_back(integrate_space(state.f2[k], grid));
    }
    return out;
}

ControlSet smooth_direction(const SpaceTimeGrid& grid,
                            std::shared_ptr<const ControlBounds> bounds) {
    constexpr std::array<double, kControlCount> weight = {1.0, -0.8, 0.6, -0.4};
    const double pi = std::numbers::pi;
    std::array<Frames, kControlCount> fields;
    for (int c = 0; c < kControlCount; ++c) {
        fields[c] = sample_frames(grid, [&](double x, double y, double t) {
            return weight[c] * std::sin(pi * x / grid.lx()) * std::sin(pi * y / grid.ly()) *
                   std::cos(pi * t / grid.t_final());
        });
    }
    return ControlSet(std::move(fields), std::move(bounds));
}

GradientCheckReport gradient_check(const ModelParams& params, const CostSpec& cost,
                                   const ControlSet& base, const BrownianPaths& paths,
                                   const SpaceTimeGrid& grid, const ControlSet& direction,
                                   const std::vector<double>& eps_list, ForwardBackend backend) {
    if (eps_list.empty()) throw ValidationError("gradient_check: empty eps list");
    base.require_strictly_inside();
    for (int c = 0; c < kControlCount; ++c) require_frames(direction.field(c), grid, "direction");

    const StateTrajectory state = solve_forward(backend, params, base, paths, grid);
    const AdjointTrajectory adjoint = solve_adjoint(state, base, cost, params, paths, grid);

    GradientCheckReport report;
    double derivative = 0.0;
    for (int c = 0; c < kControlCount; ++c) {
        Frames integrand(grid.nt() + 1, ScalarField(grid));
        for (int k = 0; k <= grid.nt(); ++k) {
            for (std::size_t n = 0; n < integrand[k].size(); ++n) {
                integrand[k][n] = (base.field(c)[k][n] - cost.reference(c)[k][n] +
                                   adjoint.g_sources[c][k][n]) *
                                  direction.field(c)[k][n];
            }
        }
        derivative += 2.0 * integrate_space_time(integrand, grid);
    }
    report.adjoint_derivative = derivative;

    report.min_relative_error = std::numeric_limits<double>::infinity();
    for (double eps : eps_list) {
        const ControlSet plus = shifted(base, direction, eps);
        const ControlSet minus = shifted(base, direction, -eps);
        if (!plus.admissible() || !minus.admissible()) {
            throw ValidationError("gradient_check: perturbation of size " + std::to_string(eps) +
                                  " leaves the admissible box");
        }
        const double j_plus =
            evaluate_cost(solve_forward(backend, params, plus, paths, grid), plus, cost, grid);
        const double j_minus =
            evaluate_cost(solve_forward(backend, params, minus, paths, grid), minus, cost, grid);
        const double fd = (j_plus - j_minus) / (2.0 * eps);
        const double scale = std::max(std::abs(fd), std::abs(derivative));
        const double rel = scale == 0.0 ? 0.0 : std::abs(fd - derivative) / scale;
        report.entries.push_back({eps, fd, rel});
        report.min_relative_error = std::min(report.min_relative_error, rel);
    }
    return report;
}

}  // namespace lcoc
