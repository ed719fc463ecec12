#include "lcoc/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "lcoc/adjoint.hpp"
#include "lcoc/errors.hpp"

namespace lcoc {

EnsembleMode parse_ensemble_mode(std::string_view name) {
    if (name == "simulate") return EnsembleMode::simulate;
    if (name == "optimize") return EnsembleMode::optimize;
    throw ValidationError("run.ensemble_mode: unknown mode '" + std::string(name) + "'");
}

std::string_view ensemble_mode_name(EnsembleMode mode) {
    return mode == EnsembleMode::simulate ? "simulate" : "optimize";
}

namespace {

struct PathResult {
    std::array<std::vector<ScalarField>, 6> snapshots;
    TimeSeries series;
    double cost = 0.0;
    bool converged = true;
    int iterations = 0;
};

PathResult run_path(const Problem& problem, const EnsembleOptions& options,
                    const std::vector<int>& levels, std::uint64_t seed) {
    const SpaceTimeGrid& grid = problem.grid;
    const BrownianPaths paths = sample_brownian(seed, problem.params.modes.n_modes(), grid);

    PathResult out;
    std::optional<ControlSet> controls;
    std::optional<StateTrajectory> state;
    std::optional<AdjointTrajectory> adjoint;
    if (options.mode == EnsembleMode::optimize) {
        FbsOptions fbs = options.fbs;
        fbs.backend = options.backend;
        auto result = fbs_optimize(problem.params, problem.cost, problem.bounds, paths, grid, fbs);
        out.converged = result.report.converged;
        out.iterations = result.report.iterations;
        out.cost = result.report.cost_history.back();
        controls = std::move(result.controls);
        state = std::move(result.state);
        adjoint = std::move(result.adjoint);
    } else {
        controls = initial_controls(problem.cost, problem.bounds);
        state = solve_forward(options.backend, problem.params, *controls, paths, grid);
        adjoint = solve_adjoint(*state, *controls, problem.cost, problem.params, paths, grid);
        out.cost = evaluate_cost(*state, *controls, problem.cost, grid);
    }
    out.series = time_series(*state, *adjoint, *controls, problem.cost, grid);
    for (int level : levels) {
        out.snapshots[0].push_back(state->f1[level]);
        out.snapshots[1].push_back(state->f2[level]);
        for (int c = 0; c < kControlCount; ++c) {
            out.snapshots[2 + c].push_back(controls->field(c)[level]);
        }
    }
    return out;
}

// Shifted two-pass statistics: identical samples give exactly zero spread.
void reduce(const std::vector<const ScalarField*>& samples, ScalarField& mean, ScalarField& sd) {
    const double n = static_cast<double>(samples.size());
    const ScalarField& ref = *samples.front();
    mean = ScalarField(ref.nx(), ref.ny());
    sd = ScalarField(ref.nx(), ref.ny());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        double shift = 0.0;
        for (const auto* s : samples) shift += (*s)[i] - ref[i];
        const double m = ref[i] + shift / n;
        double var = 0.0;
        for (const auto* s : samples) {
            const double d = (*s)[i] - m;
            var += d * d;
        }
        mean[i] = m;
        sd[i] = std::sqrt(var / n);
    }
}

}  // namespace

EnsembleSummary run_ensemble(const Problem& problem, const EnsembleOptions& options) {
    if (options.n_paths < 1) throw ValidationError("run.n_paths: must be >= 1");
    const SpaceTimeGrid& grid = problem.grid;
    std::vector<int> levels = options.snapshot_levels;
    if (levels.empty()) levels = {0, grid.nt() / 2, grid.nt()};
    for (int level : levels) {
        if (level < 0 || level > grid.nt()) {
            throw ValidationError("ensemble: snapshot level out of range");
        }
    }

    const auto n = static_cast<std::size_t>(options.n_paths);
    std::vector<std::uint64_t> seeds(n);
    for (std::size_t p = 0; p < n; ++p) seeds[p] = derive_seed(options.base_seed, p);

    std::vector<std::optional<PathResult>> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t p = next++; p < n; p = next++) {
            try {
                results[p] = run_path(problem, options, levels, seeds[p]);
            } catch (...) {
                errors[p] = std::current_exception();
            }
        }
    };

    int workers = options.workers > 0 ? options.workers
                                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min<int>(workers, options.n_paths);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    for (std::size_t p = 0; p < n; ++p) {
        if (!errors[p]) continue;
        try {
            std::rethrow_exception(errors[p]);
        } catch (const std::exception& e) {
            throw std::runtime_error("ensemble path " + std::to_string(p) + ": " + e.what());
        }
    }

    EnsembleSummary summary;
    summary.n_paths = options.n_paths;
    summary.snapshot_levels = levels;
    for (int level : levels) summary.snapshot_times.push_back(grid.t(level));
    summary.path_seeds = seeds;
    for (std::size_t q = 0; q < kEnsembleQuantities.size(); ++q) {
        for (std::size_t s = 0; s < levels.size(); ++s) {
            std::vector<const ScalarField*> samples;
            samples.reserve(n);
            for (const auto& r : results) samples.push_back(&r->snapshots[q][s]);
            ScalarField m, sd;
            reduce(samples, m, sd);
            summary.mean[q].push_back(std::move(m));
            summary.std[q].push_back(std::move(sd));
        }
    }
    auto average = [&](auto member) {
        std::vector<double> out(results.front()->series.*member);
        for (std::size_t k = 0; k < out.size(); ++k) {
            double sum = 0.0;
            for (const auto& r : results) sum += (r->series.*member)[k];
            out[k] = sum / static_cast<double>(n);
        }
        return out;
    };
    summary.series_mean.t = results.front()->series.t;
    summary.series_mean.cost = average(&TimeSeries::cost);
    summary.series_mean.residual = average(&TimeSeries::residual);
    summary.series_mean.mass_f1 = average(&TimeSeries::mass_f1);
    summary.series_mean.mass_f2 = average(&TimeSeries::mass_f2);

    double cost_shift = 0.0;
    for (const auto& r : results) {
        summary.path_costs.push_back(r->cost);
        summary.converged.push_back(r->converged);
        summary.iterations.push_back(r->iterations);
        cost_shift += r->cost - results.front()->cost;
    }
    summary.cost_mean = results.front()->cost + cost_shift / static_cast<double>(n);
    double var = 0.0;
    for (double c : summary.path_costs) var += (c - summary.cost_mean) * (c - summary.cost_mean);
    summary.cost_std = std::sqrt(var / static_cast<double>(n));
    return summary;
}

std::vector<StabilityRow> stability_probe(const Problem& problem, const ControlSet& base,
                                          const std::vector<double>& deltas, std::uint64_t seed,
                                          ForwardBackend backend) {
    const SpaceTimeGrid& grid = problem.grid;
    const BrownianPaths paths = sample_brownian(seed, problem.params.modes.n_modes(), grid);
    const double pi = std::numbers::pi;
    const ScalarField bump = sample_field(grid, [&](double x, double y) {
        return std::sin(pi * x / grid.lx()) * std::sin(pi * y / grid.ly());
    });
    std::array<Frames, kControlCount> unit;
    for (auto& f : unit) f = Frames(grid.nt() + 1, bump);
    const ControlSet direction(std::move(unit), base.shared_bounds());

    base.require_admissible();
    const StateTrajectory ref_state = solve_forward(backend, problem.params, base, paths, grid);
    const AdjointTrajectory ref_adj =
        solve_adjoint(ref_state, base, problem.cost, problem.params, paths, grid);

    std::vector<StabilityRow> rows;
    for (double delta : deltas) {
        const ControlSet c = shifted(base, direction, delta);
        if (!c.admissible()) {
            throw ValidationError("stability_probe: shift delta=" + std::to_string(delta) +
                                  " leaves the admissible box");
        }
        const StateTrajectory state = solve_forward(backend, problem.params, c, paths, grid);
        const AdjointTrajectory adj =
            solve_adjoint(state, c, problem.cost, problem.params, paths, grid);

        const double e1 = l2_distance(state.f1, ref_state.f1, grid);
        const double e2 = l2_distance(state.f2, ref_state.f2, grid);
        double adj_sq = 0.0;
        const double a1 = l2_distance(adj.z_f1, ref_adj.z_f1, grid);
        const double a2 = l2_distance(adj.z_f2, ref_adj.z_f2, grid);
        adj_sq += a1 * a1 + a2 * a2;
        for (int g = 0; g < kControlCount; ++g) {
            const double d = l2_distance(adj.z_g[g], ref_adj.z_g[g], grid);
            adj_sq += d * d;
        }
        rows.push_back({delta, std::sqrt(e1 * e1 + e2 * e2), std::sqrt(adj_sq)});
    }
    return rows;
}

}  // namespace lcoc
