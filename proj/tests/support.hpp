#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "lcoc/config.hpp"
#include "lcoc/grid.hpp"

namespace lcoc::test {

inline RunConfig demo_config() { return load_config(LCOC_DEMO_CONFIG); }

/// Demo model on a smaller mesh, for tests that only need a representative run.
inline RunConfig small_config(int n = 9, int nt = 40) {
    RunConfig c = demo_config();
    c.nx = c.ny = n;
    c.nt = nt;
    return c;
}

inline void set_constant(FieldSpec& f, double v) { f = FieldSpec{v, 0.0, 0.0}; }

inline void set_box(RunConfig& c, double lower, double upper) {
    for (auto& b : c.bounds) {
        set_constant(b[0], lower);
        set_constant(b[1], upper);
    }
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::path(LCOC_TEST_TMP) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline ScalarField random_field(const SpaceTimeGrid& grid, std::mt19937_64& rng, double lo = -1.0,
                                double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    ScalarField f(grid);
    for (std::size_t n = 0; n < f.size(); ++n) f[n] = u(rng);
    return f;
}

inline ScalarField zero_boundary(ScalarField f, const SpaceTimeGrid& grid) {
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            if (grid.is_boundary(i, j)) f(i, j) = 0.0;
        }
    }
    return f;
}

}  // namespace lcoc::test
