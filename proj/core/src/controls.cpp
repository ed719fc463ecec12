#include "lcoc/controls.hpp"

#include <cmath>
#include <string>

#include "lcoc/errors.hpp"

namespace lcoc {

double clamp(double x, double lower, double upper) {
    if (lower > upper) {
        throw ValidationError("clamp: lower bound " + std::to_string(lower) +
                              " exceeds upper bound " + std::to_string(upper));
    }
    if (x < lower) return lower;
    if (x > upper) return upper;
    return x;
}

void validate_bounds(const ControlBounds& bounds, const SpaceTimeGrid& grid) {
    for (int c = 0; c < kControlCount; ++c) {
        const std::string key = "bounds." + std::string(kControlNames[c]);
        require_frames(bounds.lower[c], grid, key.c_str());
        require_frames(bounds.upper[c], grid, key.c_str());
        for (int k = 0; k <= grid.nt(); ++k) {
            const auto& lo = bounds.lower[c][k];
            const auto& hi = bounds.upper[c][k];
            for (std::size_t n = 0; n < lo.size(); ++n) {
                if (!std::isfinite(lo[n]) || !std::isfinite(hi[n])) {
                    throw ValidationError(key + ": non-finite bound");
                }
                if (lo[n] > hi[n]) {
                    throw ValidationError(key + ": lower bound exceeds upper bound at time level " +
                                          std::to_string(k));
                }
            }
        }
    }
}

ControlSet::ControlSet(std::array<Frames, kControlCount> fields,
                       std::shared_ptr<const ControlBounds> bounds)
    : fields_(std::move(fields)), bounds_(std::move(bounds)) {
    if (!bounds_) throw ValidationError("ControlSet: bounds are required");
}

bool ControlSet::admissible() const {
    for (int c = 0; c < kControlCount; ++c) {
        for (std::size_t k = 0; k < fields_[c].size(); ++k) {
            const auto& v = fields_[c][k];
            const auto& lo = bounds_->lower[c][k];
            const auto& hi = bounds_->upper[c][k];
            for (std::size_t n = 0; n < v.size(); ++n) {
                if (!(v[n] >= lo[n] && v[n] <= hi[n])) return false;
            }
        }
    }
    return true;
}

void ControlSet::require_admissible() const {
    for (int c = 0; c < kControlCount; ++c) {
        for (std::size_t k = 0; k < fields_[c].size(); ++k) {
            const auto& v = fields_[c][k];
            const auto& lo = bounds_->lower[c][k];
            const auto& hi = bounds_->upper[c][k];
            for (std::size_t n = 0; n < v.size(); ++n) {
                if (!(v[n] >= lo[n] && v[n] <= hi[n])) {
                    throw ValidationError("control " + std::string(kControlNames[c]) +
                                          " leaves its box at time level " + std::to_string(k) +
                                          ", node " + std::to_string(n));
                }
            }
        }
    }
}

void ControlSet::require_strictly_inside() const {
    for (int c = 0; c < kControlCount; ++c) {
        for (std::size_t k = 0; k < fields_[c].size(); ++k) {
            const auto& v = fields_[c][k];
            const auto& lo = bounds_->lower[c][k];
            const auto& hi = bounds_->upper[c][k];
            for (std::size_t n = 0; n < v.size(); ++n) {
                if (!(v[n] > lo[n] && v[n] < hi[n])) {
                    throw ValidationError("control " + std::string(kControlNames[c]) +
                                          " touches its box at time level " + std::to_string(k) +
                                          ", node " + std::to_string(n));
                }
            }
        }
    }
}

const Frames& CostSpec::reference(int c) const {
    switch (c) {
        case 0: return b1;
        case 1: return b2;
        case 2: return r3;
        default: return r4;
    }
}

void validate_cost(const CostSpec& cost, const SpaceTimeGrid& grid) {
    if (!(cost.lambda1 >= 0.0)) throw ValidationError("cost.lambda1: must be >= 0");
    if (!(cost.lambda2 >= 0.0)) throw ValidationError("cost.lambda2: must be >= 0");
    const std::array<std::pair<const Frames*, const char*>, 6> fields = {{
        {&cost.r1, "cost.r1"},
        {&cost.r2, "cost.r2"},
        {&cost.r3, "cost.r3"},
        {&cost.r4, "cost.r4"},
        {&cost.b1, "cost.b1"},
        {&cost.b2, "cost.b2"},
    }};
    for (const auto& [frames, key] : fields) {
        require_frames(*frames, grid, key);
        for (const auto& f : *frames) {
            if (!f.all_finite()) throw ValidationError(std::string(key) + ": non-finite value");
        }
    }
}

ControlSet initial_controls(const CostSpec& cost, std::shared_ptr<const ControlBounds> bounds) {
    std::array<Frames, kControlCount> fields;
    for (int c = 0; c < kControlCount; ++c) {
        fields[c] = cost.reference(c);
        for (std::size_t k = 0; k < fields[c].size(); ++k) {
            auto& v = fields[c][k];
            for (std::size_t n = 0; n < v.size(); ++n) {
                v[n] = clamp(v[n], bounds->lower[c][k][n], bounds->upper[c][k][n]);
            }
        }
    }
    return ControlSet(std::move(fields), std::move(bounds));
}

ControlSet lower_bound_controls(std::shared_ptr<const ControlBounds> bounds) {
    auto fields = bounds->lower;
    return ControlSet(std::move(fields), std::move(bounds));
}

ControlSet upper_bound_controls(std::shared_ptr<const ControlBounds> bounds) {
    auto fields = bounds->upper;
    return ControlSet(std::move(fields), std::move(bounds));
}

std::shared_ptr<const ControlBounds> constant_bounds(
    const SpaceTimeGrid& grid, const std::array<std::array<double, 2>, kControlCount>& box) {
    auto bounds = std::make_shared<ControlBounds>();
    for (int c = 0; c < kControlCount; ++c) {
        bounds->lower[c] = constant_frames(grid, box[c][0]);
        bounds->upper[c] = constant_frames(grid, box[c][1]);
    }
    validate_bounds(*bounds, grid);
    return bounds;
}

double control_norm(const ControlSet& c, const SpaceTimeGrid& grid) {
    double sum = 0.0;
    for (int i = 0; i < kControlCount; ++i) {
        const double n = l2_norm(c.field(i), grid);
        sum += n * n;
    }
    return std::sqrt(sum);
}

double control_distance(const ControlSet& a, const ControlSet& b, const SpaceTimeGrid& grid) {
    double sum = 0.0;
    for (int i = 0; i < kControlCount; ++i) {
        const double d = l2_distance(a.field(i), b.field(i), grid);
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace lcoc
