#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "lcoc/controls.hpp"
#include "lcoc/forward.hpp"
#include "lcoc/optimizer.hpp"
#include "lcoc/problem.hpp"

namespace lcoc {

enum class EnsembleMode { simulate, optimize };

EnsembleMode parse_ensemble_mode(std::string_view name);
std::string_view ensemble_mode_name(EnsembleMode mode);

struct EnsembleOptions {
    int n_paths = 1;
    std::uint64_t base_seed = 0;
    EnsembleMode mode = EnsembleMode::simulate;
    /// Worker threads; 0 picks the hardware concurrency.
    int workers = 1;
    ForwardBackend backend = ForwardBackend::transformed;
    FbsOptions fbs;
    /// Time levels to summarise; {0, nt/2, nt} when empty.
    std::vector<int> snapshot_levels;
};

/// Quantities summarised per snapshot, in this order.
inline constexpr std::array<std::string_view, 6> kEnsembleQuantities = {"f1",    "f2", "beta1",
                                                                        "beta2", "s1", "s2"};

struct EnsembleSummary {
    int n_paths = 0;
    std::vector<int> snapshot_levels;
    std::vector<double> snapshot_times;
    /// mean[q][s] and std[q][s] for quantity q at snapshot s.
    std::array<std::vector<ScalarField>, 6> mean;
    std::array<std::vector<ScalarField>, 6> std;
    /// Path-averaged diagnostics at every time level.
    TimeSeries series_mean;
    double cost_mean = 0.0;
    double cost_std = 0.0;
    std::vector<std::uint64_t> path_seeds;
    std::vector<double> path_costs;
    std::vector<bool> converged;
    std::vector<int> iterations;
};

/// Runs one forward solve (or one full optimization) per path. Path k uses
/// derive_seed(base_seed, k); statistics are reduced in path order, so the
/// summary does not depend on the number of workers.
EnsembleSummary run_ensemble(const Problem& problem, const EnsembleOptions& options);

struct StabilityRow {
    double delta;
    double state_deviation;
    double adjoint_deviation;
};

/// Re-solves forward and adjoint on one path with all four controls shifted
/// by delta * sin(pi x/lx) sin(pi y/ly), and records the L2(Q_T) deviations
/// from the unshifted solve. Throws ValidationError if a shift leaves the box.
std::vector<StabilityRow> stability_probe(const Problem& problem, const ControlSet& base,
                                          const std::vector<double>& deltas, std::uint64_t seed,
                                          ForwardBackend backend = ForwardBackend::transformed);

}  // namespace lcoc
