#include "lcoc/noise.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lcoc/errors.hpp"

namespace lcoc {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// Maps 64 random bits to the open interval (0,1).
inline double open_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

double counter_normal(std::uint64_t seed, std::uint32_t stream, std::uint32_t index) {
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                              static_cast<std::uint32_t>(seed >> 32)};
    const auto w = Philox4x32::block({index, stream, 0u, 0u}, key);
    const double u1 = open_unit(w[0], w[1]);
    const double u2 = open_unit(w[2], w[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
    std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

BrownianPaths::BrownianPaths(std::uint64_t seed, int n_modes, int nt, double dt,
                             std::vector<double> increments)
    : seed_(seed), n_modes_(n_modes), nt_(nt), dt_(dt), increments_(std::move(increments)) {
    if (n_modes < 1) throw ValidationError("BrownianPaths: n_modes must be >= 1");
    if (nt < 1) throw ValidationError("BrownianPaths: nt must be >= 1");
    if (increments_.size() != static_cast<std::size_t>(n_modes) * nt) {
        throw ValidationError("BrownianPaths: increment array has wrong size");
    }
    cumulative_.assign(static_cast<std::size_t>(n_modes) * (nt + 1), 0.0);
    for (int m = 0; m < n_modes; ++m) {
        double* b = &cumulative_[static_cast<std::size_t>(m) * (nt + 1)];
        for (int k = 0; k < nt; ++k) b[k + 1] = b[k] + increment(m, k);
    }
}

BrownianPaths BrownianPaths::coarsened(int factor) const {
    if (factor < 1 || nt_ % factor != 0) {
        throw ValidationError("BrownianPaths::coarsened: factor must divide nt");
    }
    const int coarse_nt = nt_ / factor;
    std::vector<double> inc(static_cast<std::size_t>(n_modes_) * coarse_nt, 0.0);
    for (int m = 0; m < n_modes_; ++m) {
        for (int k = 0; k < coarse_nt; ++k) {
            // Difference of cumulative values keeps B(t) exact at shared levels.
            inc[static_cast<std::size_t>(m) * coarse_nt + k] =
                value(m, (k + 1) * factor) - value(m, k * factor);
        }
    }
    return BrownianPaths(seed_, n_modes_, coarse_nt, dt_ * factor, std::move(inc));
}

BrownianPaths zero_paths(int n_modes, const SpaceTimeGrid& grid) {
    return BrownianPaths(0, n_modes, grid.nt(), grid.dt(),
                         std::vector<double>(static_cast<std::size_t>(n_modes) * grid.nt(), 0.0));
}

BrownianPaths sample_brownian(std::uint64_t seed, int n_modes, const SpaceTimeGrid& grid) {
    if (n_modes < 1) throw ValidationError("sample_brownian: n_modes must be >= 1");
    const double sd = std::sqrt(grid.dt());
    std::vector<double> inc(static_cast<std::size_t>(n_modes) * grid.nt());
    for (int m = 0; m < n_modes; ++m) {
        for (int k = 0; k < grid.nt(); ++k) {
            inc[static_cast<std::size_t>(m) * grid.nt() + k] =
                sd * counter_normal(seed, static_cast<std::uint32_t>(m),
                                    static_cast<std::uint32_t>(k));
        }
    }
    return BrownianPaths(seed, n_modes, grid.nt(), grid.dt(), std::move(inc));
}

NoiseModes default_modes(int n_modes, double amplitude, const SpaceTimeGrid& grid) {
    if (n_modes < 1) throw ValidationError("default_modes: n_modes must be >= 1");
    if (!(amplitude >= 0.0)) throw ValidationError("default_modes: amplitude must be >= 0");
    NoiseModes modes;
    const double pi = std::numbers::pi;
    for (int m = 0; m < n_modes; ++m) {
        ScalarField h(grid);
        for (int j = 0; j < grid.ny(); ++j) {
            for (int i = 0; i < grid.nx(); ++i) {
                if (grid.is_boundary(i, j)) continue;  // sin vanishes there; keep it exact
                h(i, j) = amplitude * std::sin((m + 1) * pi * grid.x(i) / grid.lx()) *
                          std::sin(pi * grid.y(j) / grid.ly());
            }
        }
        modes.h1.push_back(h);
        modes.h2.push_back(std::move(h));
    }
    return modes;
}

void validate_modes(const NoiseModes& modes, const SpaceTimeGrid& grid) {
    if (modes.h1.size() != modes.h2.size()) {
        throw ValidationError("noise modes: h1 and h2 have different mode counts");
    }
    auto check = [&](const std::vector<ScalarField>& set, const char* name) {
        for (std::size_t m = 0; m < set.size(); ++m) {
            const ScalarField& h = set[m];
            require_on_grid(h, grid, "noise mode");
            for (int j = 0; j < grid.ny(); ++j) {
                for (int i = 0; i < grid.nx(); ++i) {
                    const std::string where = std::string(name) + " mode " + std::to_string(m) +
                                              " at node (" + std::to_string(i) + "," +
                                              std::to_string(j) + ")";
                    if (!std::isfinite(h(i, j))) {
                        throw ValidationError("noise " + where + ": non-finite entry");
                    }
                    if (grid.is_boundary(i, j) && std::abs(h(i, j)) > 1e-12) {
                        throw ValidationError("noise " + where +
                                              ": boundary violation, mode must vanish on the "
                                              "boundary");
                    }
                }
            }
        }
    };
    check(modes.h1, "h1");
    check(modes.h2, "h2");
}

ScalarField mode_exponent(const std::vector<ScalarField>& modes, const BrownianPaths& paths,
                          int k) {
    ScalarField out(modes.front().nx(), modes.front().ny());
    for (std::size_t m = 0; m < modes.size(); ++m) {
        const double b = paths.value(static_cast<int>(m), k);
        for (std::size_t n = 0; n < out.size(); ++n) out[n] += modes[m][n] * b;
    }
    return out;
}

ScalarField mode_increment(const std::vector<ScalarField>& modes, const BrownianPaths& paths,
                           int k) {
    ScalarField out(modes.front().nx(), modes.front().ny());
    for (std::size_t m = 0; m < modes.size(); ++m) {
        const double db = paths.increment(static_cast<int>(m), k);
        for (std::size_t n = 0; n < out.size(); ++n) out[n] += modes[m][n] * db;
    }
    return out;
}

ScalarField mode_square_sum(const std::vector<ScalarField>& modes, const SpaceTimeGrid& grid) {
    ScalarField out(grid);
    for (const auto& h : modes) {
        for (std::size_t n = 0; n < out.size(); ++n) out[n] += h[n] * h[n];
    }
    return out;
}

}  // namespace lcoc
