#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lcoc/grid.hpp"

namespace lcoc {

/// Philox4x32-10 counter-based generator. Every (key, counter) pair maps to an
/// independent block of four 32-bit words, so samples can be addressed
/// directly by index instead of drawn from a sequential stream.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter counter, Key key);
};

/// Standard normal addressed by (seed, stream, index).
double counter_normal(std::uint64_t seed, std::uint32_t stream, std::uint32_t index);

/// Per-path seed derived from (base_seed, path index) by a splitmix64 mix.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index);

/// Sampled (n+1)-dimensional Brownian driver on the time mesh of a grid.
class BrownianPaths {
public:
    BrownianPaths(std::uint64_t seed, int n_modes, int nt, double dt,
                  std::vector<double> increments);

    std::uint64_t seed() const { return seed_; }
    int n_modes() const { return n_modes_; }
    int nt() const { return nt_; }
    double dt() const { return dt_; }

    /// Increment of mode i over [t_k, t_{k+1}].
    double increment(int mode, int k) const { return increments_[index(mode, k)]; }
    /// B_i(t_k), with B_i(0) = 0.
    double value(int mode, int k) const {
        return cumulative_[static_cast<std::size_t>(mode) * (nt_ + 1) + k];
    }

    /// Same path observed on a mesh `factor` times coarser: increments are
    /// summed in blocks, so B(t) agrees at the shared time levels.
    BrownianPaths coarsened(int factor) const;

    bool operator==(const BrownianPaths& other) const = default;

private:
    std::size_t index(int mode, int k) const {
        return static_cast<std::size_t>(mode) * nt_ + k;
    }

    std::uint64_t seed_;
    int n_modes_;
    int nt_;
    double dt_;
    std::vector<double> increments_;
    std::vector<double> cumulative_;
};

/// All-zero driver, for deterministic runs that still need a path object.
BrownianPaths zero_paths(int n_modes, const SpaceTimeGrid& grid);

BrownianPaths sample_brownian(std::uint64_t seed, int n_modes, const SpaceTimeGrid& grid);

/// Spatial noise modes h_{i,1} and h_{i,2}.
struct NoiseModes {
    std::vector<ScalarField> h1;
    std::vector<ScalarField> h2;

    int n_modes() const { return static_cast<int>(h1.size()); }
};

/// Mode i = amplitude * sin((i+1) pi x / lx) * sin(pi y / ly) for both equations.
NoiseModes default_modes(int n_modes, double amplitude, const SpaceTimeGrid& grid);

/// Throws ValidationError naming the mode and node when a mode is non-finite
/// or does not vanish (to 1e-12) on the boundary.
void validate_modes(const NoiseModes& modes, const SpaceTimeGrid& grid);

/// sum_i h_i * B_i(t_k)
ScalarField mode_exponent(const std::vector<ScalarField>& modes, const BrownianPaths& paths,
                          int k);
/// sum_i h_i * dB_i over [t_k, t_{k+1}]
ScalarField mode_increment(const std::vector<ScalarField>& modes, const BrownianPaths& paths,
                           int k);
/// sum_i h_i^2
ScalarField mode_square_sum(const std::vector<ScalarField>& modes, const SpaceTimeGrid& grid);

}  // namespace lcoc
