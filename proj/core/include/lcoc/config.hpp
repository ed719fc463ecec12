#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lcoc/controls.hpp"
#include "lcoc/ensemble.hpp"
#include "lcoc/forward.hpp"
#include "lcoc/grid.hpp"
#include "lcoc/problem.hpp"

namespace lcoc {

/// base + bump * sin(pi x/lx) sin(pi y/ly) + slope * t. A bare number in the
/// config file is a FieldSpec with only `base` set.
struct FieldSpec {
    double base = 0.0;
    double bump = 0.0;
    double slope = 0.0;

    double operator()(double x, double y, double t, const SpaceTimeGrid& grid) const;
    Frames frames(const SpaceTimeGrid& grid) const;
    ScalarField at(const SpaceTimeGrid& grid, int k) const;
};

struct AdvectionSpec {
    enum class Type { none, rotation, uniform };
    Type type = Type::none;
    double omega = 0.0;
    double u = 0.0;
    double v = 0.0;

    VelocityField velocity(const SpaceTimeGrid& grid) const;
    double max_speed(const SpaceTimeGrid& grid) const;
};

/// amplitude * sin(kx pi x/lx) sin(ky pi y/ly)
struct ModeShape {
    double amplitude = 0.0;
    int kx = 1;
    int ky = 1;
};

struct ExplicitMode {
    ModeShape h1;
    ModeShape h2;
};

struct RunConfig {
    // grid
    int nx = 0;
    int ny = 0;
    double lx = 1.0;
    double ly = 1.0;
    int nt = 0;
    double t_final = 1.0;

    // model
    double d1 = 0.01;
    double d2 = 0.01;
    double k = 0.05;
    double alpha = 1.31;
    double capacity = 10.0;
    AdvectionSpec advection1;
    AdvectionSpec advection2;
    /// Initial data is f(x,y,0), Dirichlet data is f on the boundary.
    FieldSpec f1;
    FieldSpec f2;
    bool clip_negative = false;

    // noise
    int n_modes = 2;
    double amplitude = 0.1;
    std::vector<ExplicitMode> modes;  // overrides n_modes/amplitude when non-empty

    // cost
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    FieldSpec r1;
    FieldSpec r2;
    FieldSpec r3;
    FieldSpec r4;
    FieldSpec b1;
    FieldSpec b2;

    // bounds, per control {lower, upper}
    std::array<std::array<FieldSpec, 2>, kControlCount> bounds;

    // optimizer
    double damping = 0.5;
    double tol = 1e-6;
    int max_iter = 500;

    // solver
    ForwardBackend backend = ForwardBackend::transformed;

    // run
    std::uint64_t seed = 0;
    int n_paths = 1;
    std::string output = "out";
    EnsembleMode ensemble_mode = EnsembleMode::simulate;
    int workers = 1;
    /// Time levels written as field snapshots; {0, nt/2, nt} when empty.
    std::vector<int> snapshots;

    // checks
    bool gradient_stochastic = false;
    std::vector<double> gradient_eps = {1e-2, 1e-3, 1e-4};
    std::optional<double> gradient_tolerance;  // 1e-3 deterministic, 1e-2 stochastic
    std::vector<int> equivalence_levels = {250, 500, 1000, 2000};
    /// Fixed paths per ladder; the error is the root mean square over them.
    int equivalence_paths = 64;
    double equivalence_min_ratio = 1.3;
    double equivalence_noise_off_tol = 1e-8;
    std::vector<double> stability_deltas = {0.0, 0.0025, 0.005, 0.01, 0.02, 0.04};
    double stability_max_ratio = 4.5;
    double stability_bound = 1e-2;

    /// Non-fatal findings from loading (unknown keys, CFL).
    std::vector<std::string> warnings;

    double gradient_tol() const;
    bool noise_off() const;
};

/// Parses and validates a JSON config. Errors are ValidationError with the
/// offending key in the message; `source` only labels parse errors.
RunConfig parse_config(std::string_view text, std::string_view source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

SpaceTimeGrid build_grid(const RunConfig& config);
Problem build_problem(const RunConfig& config);
/// Same problem on another mesh (used for time-step ladders).
Problem build_problem(const RunConfig& config, const SpaceTimeGrid& grid);
EnsembleOptions ensemble_options(const RunConfig& config);
FbsOptions fbs_options(const RunConfig& config);

}  // namespace lcoc
