#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include "lcoc/errors.hpp"
#include "lcoc/noise.hpp"

using namespace lcoc;

TEST(Philox, MatchesReferenceVectors) {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    EXPECT_EQ(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}),
              (C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(Philox4x32::block(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                K{0xffffffffu, 0xffffffffu}),
              (C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(Philox4x32::block(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                K{0xa4093822u, 0x299f31d0u}),
              (C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterNormal, HasStandardMoments) {
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = counter_normal(99, 3, static_cast<std::uint32_t>(i));
        ASSERT_TRUE(std::isfinite(z));
        sum += z;
        sq += z * z;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(n));
    EXPECT_LT(std::abs(var - 1.0), 4.0 * std::sqrt(2.0 / n));
}

TEST(CounterNormal, IsAddressedNotSequential) {
    const double a = counter_normal(5, 1, 17);
    counter_normal(5, 1, 3);
    EXPECT_EQ(counter_normal(5, 1, 17), a);
    EXPECT_NE(counter_normal(5, 2, 17), a);
    EXPECT_NE(counter_normal(6, 1, 17), a);
}

TEST(DeriveSeed, SpreadsPathIndices) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(derive_seed(42, k));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
    EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

TEST(Brownian, SameInputsGiveBitwiseEqualPaths) {
    const SpaceTimeGrid g(5, 5, 1, 1, 50, 1);
    EXPECT_EQ(sample_brownian(11, 3, g), sample_brownian(11, 3, g));
    EXPECT_FALSE(sample_brownian(11, 3, g) == sample_brownian(12, 3, g));
}

TEST(Brownian, SingleStepPrefixSum) {
    const SpaceTimeGrid g(5, 5, 1, 1, 1, 1);
    const auto p = sample_brownian(4, 1, g);
    EXPECT_EQ(p.value(0, 0), 0.0);
    EXPECT_EQ(p.value(0, 1), p.increment(0, 0));
}

TEST(Brownian, StartsAtZeroAndSumsIncrements) {
    const SpaceTimeGrid g(5, 5, 1, 1, 30, 2);
    const auto p = sample_brownian(8, 4, g);
    for (int m = 0; m < 4; ++m) {
        EXPECT_EQ(p.value(m, 0), 0.0);
        double s = 0.0;
        for (int k = 0; k < g.nt(); ++k) {
            s += p.increment(m, k);
            EXPECT_EQ(p.value(m, k + 1), s);
        }
    }
}

TEST(Brownian, IncrementsHaveVarianceDt) {
    const SpaceTimeGrid g(5, 5, 1, 1, 20000, 4.0);
    const auto p = sample_brownian(2024, 1, g);
    double sq = 0.0;
    for (int k = 0; k < g.nt(); ++k) sq += p.increment(0, k) * p.increment(0, k);
    const double var = sq / g.nt();
    EXPECT_LT(std::abs(var / g.dt() - 1.0), 4.0 * std::sqrt(2.0 / g.nt()));
}

TEST(Brownian, TerminalValueMoments) {
    const SpaceTimeGrid g(3, 3, 1, 1, 8, 1.0);
    const int paths = 10000;
    double sum = 0.0, sq = 0.0;
    for (int p = 0; p < paths; ++p) {
        const double b = sample_brownian(derive_seed(1, p), 1, g).value(0, g.nt());
        sum += b;
        sq += b * b;
    }
    const double mean = sum / paths;
    const double var = (sq - paths * mean * mean) / (paths - 1);
    EXPECT_LT(std::abs(mean), 3.0 / std::sqrt(paths));
    EXPECT_LT(std::abs(var - 1.0), 3.0 * std::sqrt(2.0 / paths));
}

TEST(Brownian, CoarseningKeepsSharedTimeLevels) {
    const SpaceTimeGrid g(5, 5, 1, 1, 64, 1);
    const auto fine = sample_brownian(3, 2, g);
    const auto coarse = fine.coarsened(8);
    EXPECT_EQ(coarse.nt(), 8);
    EXPECT_DOUBLE_EQ(coarse.dt(), g.dt() * 8);
    for (int m = 0; m < 2; ++m) {
        for (int k = 0; k <= 8; ++k) EXPECT_NEAR(coarse.value(m, k), fine.value(m, 8 * k), 1e-14);
    }
    EXPECT_THROW(fine.coarsened(5), ValidationError);
}

TEST(Brownian, RejectsEmptyModeSet) {
    const SpaceTimeGrid g(5, 5, 1, 1, 4, 1);
    EXPECT_THROW(sample_brownian(1, 0, g), ValidationError);
}

TEST(Brownian, ZeroPathsAreZero) {
    const SpaceTimeGrid g(5, 5, 1, 1, 4, 1);
    const auto p = zero_paths(2, g);
    for (int m = 0; m < 2; ++m) {
        for (int k = 0; k <= 4; ++k) EXPECT_EQ(p.value(m, k), 0.0);
    }
}

TEST(Modes, ZeroAmplitudeGivesZeroModes) {
    const SpaceTimeGrid g(9, 9, 1, 1, 1, 1);
    const auto modes = default_modes(3, 0.0, g);
    ASSERT_EQ(modes.n_modes(), 3);
    for (const auto* set : {&modes.h1, &modes.h2}) {
        for (const auto& h : *set) EXPECT_EQ(h.max_abs(), 0.0);
    }
}

TEST(Modes, VanishExactlyOnTheBoundary) {
    const SpaceTimeGrid g(10, 7, 1.7, 0.6, 1, 1);
    const auto modes = default_modes(4, 0.9, g);
    for (const auto* set : {&modes.h1, &modes.h2}) {
        for (const auto& h : *set) {
            for (int j = 0; j < g.ny(); ++j) {
                for (int i = 0; i < g.nx(); ++i) {
                    if (g.is_boundary(i, j)) EXPECT_EQ(h(i, j), 0.0);
                }
            }
        }
    }
    EXPECT_NO_THROW(validate_modes(modes, g));
}

TEST(Modes, CenterValueOfFirstMode) {
    const SpaceTimeGrid g(17, 17, 1, 1, 1, 1);
    const auto modes = default_modes(2, 0.2, g);
    const double expected = 0.2 * std::sin(std::numbers::pi / 2) * std::sin(std::numbers::pi / 2);
    EXPECT_NEAR(modes.h1[0](8, 8), expected, 1e-15);
    EXPECT_NEAR(modes.h2[0](8, 8), expected, 1e-15);
    // Mode 1 has a node line through the center in x.
    EXPECT_NEAR(modes.h1[1](8, 8), 0.0, 1e-15);
}

TEST(Modes, ValidationNamesBoundaryViolation) {
    const SpaceTimeGrid g(6, 6, 1, 1, 1, 1);
    auto modes = default_modes(2, 0.1, g);
    modes.h2[1] = ScalarField(g, 1.0);
    try {
        validate_modes(modes, g);
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("boundary violation"), std::string::npos) << msg;
        EXPECT_NE(msg.find("1"), std::string::npos) << msg;
    }
}

TEST(Modes, ValidationNamesNonFiniteEntry) {
    const SpaceTimeGrid g(6, 6, 1, 1, 1, 1);
    auto modes = default_modes(1, 0.1, g);
    modes.h1[0](2, 3) = std::numeric_limits<double>::quiet_NaN();
    try {
        validate_modes(modes, g);
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("non-finite entry"), std::string::npos) << e.what();
    }
}

TEST(Modes, ExponentAndIncrementCombineModes) {
    const SpaceTimeGrid g(7, 7, 1, 1, 10, 1);
    const auto modes = default_modes(2, 0.3, g);
    const auto p = sample_brownian(5, 2, g);
    const auto phi = mode_exponent(modes.h1, p, 6);
    const auto inc = mode_increment(modes.h1, p, 6);
    const auto sq = mode_square_sum(modes.h1, g);
    for (std::size_t n = 0; n < phi.size(); ++n) {
        const double a = modes.h1[0][n], b = modes.h1[1][n];
        EXPECT_NEAR(phi[n], a * p.value(0, 6) + b * p.value(1, 6), 1e-15);
        EXPECT_NEAR(inc[n], a * p.increment(0, 6) + b * p.increment(1, 6), 1e-15);
        EXPECT_NEAR(sq[n], a * a + b * b, 1e-15);
    }
}
