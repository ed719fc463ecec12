#include "lcoc/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "lcoc/adjoint.hpp"
#include "lcoc/ensemble.hpp"
#include "lcoc/errors.hpp"
#include "lcoc/forward.hpp"
#include "lcoc/optimizer.hpp"

namespace lcoc {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string field_file_name(std::string_view name, double t) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", t);
    return "fields_" + std::string(name) + "_" + buf + ".csv";
}

namespace {

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write output file '" + path.string() + "'");
    return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) throw std::runtime_error("failed writing output file '" + path.string() + "'");
}

}  // namespace

void write_field_csv(const fs::path& path, const ScalarField& field, const SpaceTimeGrid& grid) {
    require_on_grid(field, grid, "write_field_csv");
    std::ofstream out = open_output(path);
    out << "x,y,value\n";
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            out << format_number(grid.x(i)) << ',' << format_number(grid.y(j)) << ','
                << format_number(field(i, j)) << '\n';
        }
    }
    close_output(out, path);
}

ScalarField read_field_csv(const fs::path& path, const SpaceTimeGrid& grid) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "x,y,value") {
        throw ValidationError(path.string() + ": expected header x,y,value");
    }
    ScalarField field(grid);
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (n >= field.size()) throw ValidationError(path.string() + ": too many rows");
        const auto comma = line.rfind(',');
        field[n++] = std::stod(line.substr(comma + 1));
    }
    if (n != field.size()) throw ValidationError(path.string() + ": too few rows");
    return field;
}

namespace {

struct Context {
    const RunConfig& config;
    std::ostream& log;
    fs::path dir;
};

fs::path prepare_output(const std::string& output) {
    const fs::path dir(output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw std::runtime_error("output directory '" + output + "' is not writable" +
                                 (ec ? ": " + ec.message() : std::string()));
    }
    return dir;
}

std::vector<int> snapshot_levels(const RunConfig& config, const SpaceTimeGrid& grid) {
    if (!config.snapshots.empty()) return config.snapshots;
    return {0, grid.nt() / 2, grid.nt()};
}

void write_snapshots(const Context& ctx, std::string_view name, const Frames& frames,
                     const SpaceTimeGrid& grid) {
    for (int level : snapshot_levels(ctx.config, grid)) {
        write_field_csv(ctx.dir / field_file_name(name, grid.t(level)), frames[level], grid);
    }
}

void write_timeseries(const Context& ctx, const TimeSeries& s) {
    const fs::path path = ctx.dir / "timeseries.csv";
    std::ofstream out = open_output(path);
    out << "t,cost,residual,mass_f1,mass_f2\n";
    for (std::size_t k = 0; k < s.t.size(); ++k) {
        out << format_number(s.t[k]) << ',' << format_number(s.cost[k]) << ','
            << format_number(s.residual[k]) << ',' << format_number(s.mass_f1[k]) << ','
            << format_number(s.mass_f2[k]) << '\n';
    }
    close_output(out, path);
}

void write_report(const Context& ctx, const Json& report) {
    const fs::path path = ctx.dir / "report.json";
    std::ofstream out = open_output(path);
    out << report.dump(2) << '\n';
    close_output(out, path);
}

Json base_report(const RunConfig& config, std::string_view command) {
    Json r;
    r["command"] = command;
    r["backend"] = backend_name(config.backend);
    r["grid"] = {{"nx", config.nx}, {"ny", config.ny}, {"nt", config.nt},
                 {"t_final", config.t_final}};
    return r;
}

// Same problem with every noise mode switched off.
Problem without_noise(Problem problem) {
    for (auto* set : {&problem.params.modes.h1, &problem.params.modes.h2}) {
        for (auto& h : *set) h *= 0.0;
    }
    return problem;
}

CommandStatus cmd_simulate(const Context& ctx) {
    const RunConfig& config = ctx.config;
    const Problem problem = build_problem(config);
    const SpaceTimeGrid& grid = problem.grid;
    const BrownianPaths paths = sample_brownian(config.seed, problem.params.modes.n_modes(), grid);
    const ControlSet controls = initial_controls(problem.cost, problem.bounds);
    const StateTrajectory state =
        solve_forward(config.backend, problem.params, controls, paths, grid);
    const AdjointTrajectory adjoint =
        solve_adjoint(state, controls, problem.cost, problem.params, paths, grid);
    const TimeSeries series = time_series(state, adjoint, controls, problem.cost, grid);

    write_snapshots(ctx, "f1", state.f1, grid);
    write_snapshots(ctx, "f2", state.f2, grid);
    write_timeseries(ctx, series);

    const ControlSet proposal = update_controls(adjoint, state, problem.cost, controls, problem.params);
    Json r = base_report(config, "simulate");
    r["seeds"] = {config.seed};
    r["iterations"] = 0;
    r["cost"] = series.cost.back();
    r["kkt_residual"] = control_distance(controls, proposal, grid);
    write_report(ctx, r);
    ctx.log << "simulate: cost " << format_number(series.cost.back()) << '\n';
    return CommandStatus::ok;
}

CommandStatus cmd_optimize(const Context& ctx) {
    const RunConfig& config = ctx.config;
    const Problem problem = build_problem(config);
    const SpaceTimeGrid& grid = problem.grid;
    const BrownianPaths paths = sample_brownian(config.seed, problem.params.modes.n_modes(), grid);
    const OptimizationResult result = fbs_optimize(problem.params, problem.cost, problem.bounds,
                                                   paths, grid, fbs_options(config));

    write_snapshots(ctx, "f1", result.state.f1, grid);
    write_snapshots(ctx, "f2", result.state.f2, grid);
    for (int c = 0; c < kControlCount; ++c) {
        write_snapshots(ctx, kControlNames[c], result.controls.field(c), grid);
    }
    write_snapshots(ctx, "z_f1", result.adjoint.z_f1, grid);
    write_snapshots(ctx, "z_f2", result.adjoint.z_f2, grid);
    write_timeseries(ctx, time_series(result.state, result.adjoint, result.controls,
                                      problem.cost, grid));

    const OptimizationReport& rep = result.report;
    {
        const fs::path path = ctx.dir / "iterations.csv";
        std::ofstream out = open_output(path);
        out << "iteration,cost,residual\n";
        for (std::size_t i = 0; i < rep.cost_history.size(); ++i) {
            out << i + 1 << ',' << format_number(rep.cost_history[i]) << ','
                << format_number(rep.control_residual_history[i]) << '\n';
        }
        close_output(out, path);
    }

    Json r = base_report(config, "optimize");
    r["seeds"] = {config.seed};
    r["iterations"] = rep.iterations;
    r["cost"] = rep.cost_history.back();
    r["kkt_residual"] = rep.kkt_residual;
    r["kkt_relative"] = rep.kkt_relative;
    r["converged"] = rep.converged;
    r["damping"] = config.damping;
    r["tol"] = config.tol;
    write_report(ctx, r);
    ctx.log << "optimize: " << rep.iterations << " sweeps, relative defect "
            << format_number(rep.kkt_relative) << (rep.converged ? "" : " (not converged)")
            << '\n';
    return CommandStatus::ok;
}

CommandStatus cmd_gradient_check(const Context& ctx) {
    const RunConfig& config = ctx.config;
    Problem problem = build_problem(config);
    if (!config.gradient_stochastic) problem = without_noise(std::move(problem));
    const SpaceTimeGrid& grid = problem.grid;
    const int n_modes = problem.params.modes.n_modes();
    const BrownianPaths paths = config.gradient_stochastic
                                    ? sample_brownian(config.seed, n_modes, grid)
                                    : zero_paths(n_modes, grid);
    const ControlSet base = initial_controls(problem.cost, problem.bounds);
    const ControlSet direction = smooth_direction(grid, problem.bounds);
    const GradientCheckReport rep = gradient_check(problem.params, problem.cost, base, paths, grid,
                                                   direction, config.gradient_eps, config.backend);

    {
        const fs::path path = ctx.dir / "gradient_check.csv";
        std::ofstream out = open_output(path);
        out << "eps,finite_difference,adjoint_derivative,relative_error\n";
        for (const auto& e : rep.entries) {
            out << format_number(e.eps) << ',' << format_number(e.finite_difference) << ','
                << format_number(rep.adjoint_derivative) << ','
                << format_number(e.relative_error) << '\n';
        }
        close_output(out, path);
    }

    const double tol = config.gradient_tol();
    const bool pass = rep.min_relative_error < tol;
    Json r = base_report(config, "gradient-check");
    r["seeds"] = config.gradient_stochastic ? Json::array({config.seed}) : Json::array();
    r["stochastic"] = config.gradient_stochastic;
    r["adjoint_derivative"] = rep.adjoint_derivative;
    r["min_relative_error"] = rep.min_relative_error;
    r["tolerance"] = tol;
    r["pass"] = pass;
    write_report(ctx, r);
    ctx.log << "gradient-check: min relative error " << format_number(rep.min_relative_error)
            << (pass ? " PASS" : " FAIL") << '\n';
    return pass ? CommandStatus::ok : CommandStatus::check_failed;
}

double backend_gap(const Problem& problem, const BrownianPaths& paths, bool max_abs) {
    const ControlSet controls = initial_controls(problem.cost, problem.bounds);
    const auto em = solve_forward_em(problem.params, controls, paths, problem.grid);
    const auto tr = solve_forward_transformed(problem.params, controls, paths, problem.grid);
    if (max_abs) {
        double m = 0.0;
        for (int k = 0; k <= problem.grid.nt(); ++k) {
            m = std::max({m, (em.f1[k] - tr.f1[k]).max_abs(), (em.f2[k] - tr.f2[k]).max_abs()});
        }
        return m;
    }
    const double e1 = l2_distance(em.f1, tr.f1, problem.grid);
    const double e2 = l2_distance(em.f2, tr.f2, problem.grid);
    return std::sqrt(e1 * e1 + e2 * e2);
}

CommandStatus cmd_equivalence_check(const Context& ctx) {
    const RunConfig& config = ctx.config;
    Json r = base_report(config, "equivalence-check");
    r["seeds"] = {config.seed};
    bool pass = true;

    if (config.noise_off()) {
        const Problem problem = build_problem(config);
        const BrownianPaths paths = zero_paths(problem.params.modes.n_modes(), problem.grid);
        const double gap = backend_gap(problem, paths, true);
        pass = gap < config.equivalence_noise_off_tol;
        const fs::path path = ctx.dir / "equivalence.csv";
        std::ofstream out = open_output(path);
        out << "nt,dt,max_abs_error\n"
            << config.nt << ',' << format_number(problem.grid.dt()) << ',' << format_number(gap)
            << '\n';
        close_output(out, path);
        r["mode"] = "noise-off";
        r["max_abs_error"] = gap;
        r["tolerance"] = config.equivalence_noise_off_tol;
        ctx.log << "equivalence-check: noise off, max-abs gap " << format_number(gap) << '\n';
    } else {
        const auto& levels = config.equivalence_levels;
        const SpaceTimeGrid base_grid = build_grid(config);
        const int finest = levels.back();
        const int n_modes = build_problem(config, base_grid.with_time_steps(levels.front()))
                                .params.modes.n_modes();
        std::vector<Problem> problems;
        for (int nt : levels) problems.push_back(build_problem(config, base_grid.with_time_steps(nt)));
        std::vector<double> errors(levels.size(), 0.0);
        Json seeds = Json::array();
        for (int p = 0; p < config.equivalence_paths; ++p) {
            const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(p));
            seeds.push_back(seed);
            const BrownianPaths fine =
                sample_brownian(seed, n_modes, base_grid.with_time_steps(finest));
            for (std::size_t i = 0; i < levels.size(); ++i) {
                const double e = backend_gap(problems[i], fine.coarsened(finest / levels[i]), false);
                errors[i] += e * e;
            }
        }
        for (std::size_t i = 0; i < levels.size(); ++i) {
            errors[i] = std::sqrt(errors[i] / config.equivalence_paths);
            ctx.log << "equivalence-check: nt " << levels[i] << " rms error "
                    << format_number(errors[i]) << '\n';
        }
        r["seeds"] = seeds;
        r["n_paths"] = config.equivalence_paths;
        const fs::path path = ctx.dir / "equivalence.csv";
        std::ofstream out = open_output(path);
        out << "nt,dt,error,ratio\n";
        Json ratios = Json::array();
        for (std::size_t i = 0; i < levels.size(); ++i) {
            out << levels[i] << ',' << format_number(config.t_final / levels[i]) << ','
                << format_number(errors[i]) << ',';
            if (i > 0) {
                const double ratio = errors[i - 1] / errors[i];
                ratios.push_back(ratio);
                if (!(ratio >= config.equivalence_min_ratio)) pass = false;
                out << format_number(ratio);
            }
            out << '\n';
        }
        close_output(out, path);
        r["mode"] = "dt-halving";
        r["levels"] = levels;
        r["errors"] = errors;
        r["ratios"] = ratios;
        r["min_ratio"] = config.equivalence_min_ratio;
    }
    r["pass"] = pass;
    write_report(ctx, r);
    ctx.log << "equivalence-check: " << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? CommandStatus::ok : CommandStatus::check_failed;
}

CommandStatus cmd_ensemble(const Context& ctx) {
    const RunConfig& config = ctx.config;
    const Problem problem = build_problem(config);
    const SpaceTimeGrid& grid = problem.grid;
    const EnsembleSummary s = run_ensemble(problem, ensemble_options(config));

    for (std::size_t q = 0; q < kEnsembleQuantities.size(); ++q) {
        const std::string name(kEnsembleQuantities[q]);
        for (std::size_t i = 0; i < s.snapshot_levels.size(); ++i) {
            const double t = s.snapshot_times[i];
            write_field_csv(ctx.dir / field_file_name("mean_" + name, t), s.mean[q][i], grid);
            write_field_csv(ctx.dir / field_file_name("std_" + name, t), s.std[q][i], grid);
        }
    }
    write_timeseries(ctx, s.series_mean);
    {
        const fs::path path = ctx.dir / "paths.csv";
        std::ofstream out = open_output(path);
        out << "path,seed,cost,converged,iterations\n";
        for (int p = 0; p < s.n_paths; ++p) {
            out << p << ',' << s.path_seeds[p] << ',' << format_number(s.path_costs[p]) << ','
                << (s.converged[p] ? 1 : 0) << ',' << s.iterations[p] << '\n';
        }
        close_output(out, path);
    }

    Json r = base_report(config, "ensemble");
    r["mode"] = ensemble_mode_name(config.ensemble_mode);
    r["n_paths"] = s.n_paths;
    r["base_seed"] = config.seed;
    r["seeds"] = s.path_seeds;
    r["cost_mean"] = s.cost_mean;
    r["cost_std"] = s.cost_std;
    r["iterations"] = s.iterations;
    r["converged"] = std::all_of(s.converged.begin(), s.converged.end(), [](bool b) { return b; });
    write_report(ctx, r);
    ctx.log << "ensemble: " << s.n_paths << " paths, mean cost " << format_number(s.cost_mean)
            << '\n';
    return CommandStatus::ok;
}

CommandStatus cmd_stability_probe(const Context& ctx) {
    const RunConfig& config = ctx.config;
    const Problem problem = build_problem(config);
    std::vector<double> deltas = config.stability_deltas;
    std::sort(deltas.begin(), deltas.end());
    if (deltas.front() < 0.0) throw ValidationError("checks.stability.deltas: must be >= 0");
    const ControlSet base = initial_controls(problem.cost, problem.bounds);
    const auto rows = stability_probe(problem, base, deltas, config.seed, config.backend);

    {
        const fs::path path = ctx.dir / "stability.csv";
        std::ofstream out = open_output(path);
        out << "delta,state_deviation,adjoint_deviation\n";
        for (const auto& row : rows) {
            out << format_number(row.delta) << ',' << format_number(row.state_deviation) << ','
                << format_number(row.adjoint_deviation) << '\n';
        }
        close_output(out, path);
    }

    // Checks: monotone in delta, bounded growth between the two smallest
    // nonzero shifts, small deviation at the smallest one.
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].state_deviation < rows[i - 1].state_deviation ||
            rows[i].adjoint_deviation < rows[i - 1].adjoint_deviation) {
            monotone = false;
        }
    }
    std::vector<StabilityRow> nonzero;
    for (const auto& row : rows) {
        if (row.delta > 0.0) nonzero.push_back(row);
    }
    if (nonzero.size() < 2) {
        throw ValidationError("checks.stability.deltas: need at least two positive shifts");
    }
    const double state_ratio = nonzero[1].state_deviation / nonzero[0].state_deviation;
    const double adjoint_ratio = nonzero[1].adjoint_deviation / nonzero[0].adjoint_deviation;
    const double smallest = std::max(nonzero[0].state_deviation, nonzero[0].adjoint_deviation);
    const bool ratio_ok =
        state_ratio <= config.stability_max_ratio && adjoint_ratio <= config.stability_max_ratio;
    const bool bound_ok = smallest < config.stability_bound;
    const bool pass = monotone && ratio_ok && bound_ok;

    Json r = base_report(config, "stability-probe");
    r["seeds"] = {config.seed};
    r["monotone"] = monotone;
    r["state_ratio"] = state_ratio;
    r["adjoint_ratio"] = adjoint_ratio;
    r["max_ratio"] = config.stability_max_ratio;
    r["smallest_delta_deviation"] = smallest;
    r["bound"] = config.stability_bound;
    r["pass"] = pass;
    write_report(ctx, r);
    ctx.log << "stability-probe: ratios " << format_number(state_ratio) << ", "
            << format_number(adjoint_ratio) << (pass ? " PASS" : " FAIL") << '\n';
    return pass ? CommandStatus::ok : CommandStatus::check_failed;
}

}  // namespace

CommandStatus run_command(std::string_view command, const RunConfig& config, std::ostream& log) {
    using Handler = CommandStatus (*)(const Context&);
    Handler handler = nullptr;
    if (command == "simulate") handler = cmd_simulate;
    if (command == "optimize") handler = cmd_optimize;
    if (command == "gradient-check") handler = cmd_gradient_check;
    if (command == "equivalence-check") handler = cmd_equivalence_check;
    if (command == "ensemble") handler = cmd_ensemble;
    if (command == "stability-probe") handler = cmd_stability_probe;
    if (!handler) throw ValidationError("unknown command '" + std::string(command) + "'");
    const Context ctx{config, log, prepare_output(config.output)};
    return handler(ctx);
}

}  // namespace lcoc
