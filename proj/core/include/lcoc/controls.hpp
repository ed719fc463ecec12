#pragma once

#include <array>
#include <memory>
#include <string_view>

#include "lcoc/grid.hpp"

namespace lcoc {

/// Index of the four control fields.
enum class Control : int { beta1 = 0, beta2 = 1, s1 = 2, s2 = 3 };

inline constexpr int kControlCount = 4;
inline constexpr std::array<std::string_view, kControlCount> kControlNames = {"beta1", "beta2",
                                                                               "s1", "s2"};

/// Projection onto [lower, upper]. Throws ValidationError when lower > upper.
double clamp(double x, double lower, double upper);

/// Box bounds l* <= v <= l** for each control, sampled on space-time nodes.
struct ControlBounds {
    std::array<Frames, kControlCount> lower;
    std::array<Frames, kControlCount> upper;
};

/// Throws ValidationError naming the control when l* > l** anywhere.
void validate_bounds(const ControlBounds& bounds, const SpaceTimeGrid& grid);

/// Growth rates and statuses over space-time, with the box they live in.
class ControlSet {
public:
    ControlSet() = default;
    ControlSet(std::array<Frames, kControlCount> fields,
               std::shared_ptr<const ControlBounds> bounds);

    Frames& operator[](Control c) { return fields_[static_cast<int>(c)]; }
    const Frames& operator[](Control c) const { return fields_[static_cast<int>(c)]; }
    Frames& field(int c) { return fields_[c]; }
    const Frames& field(int c) const { return fields_[c]; }

    const Frames& beta1() const { return fields_[0]; }
    const Frames& beta2() const { return fields_[1]; }
    const Frames& s1() const { return fields_[2]; }
    const Frames& s2() const { return fields_[3]; }

    const ControlBounds& bounds() const { return *bounds_; }
    const std::shared_ptr<const ControlBounds>& shared_bounds() const { return bounds_; }

    /// True when every value lies in its closed box.
    bool admissible() const;
    /// Throws ValidationError naming the first out-of-box control and node.
    void require_admissible() const;
    /// Throws ValidationError when any value touches or leaves its box.
    void require_strictly_inside() const;

private:
    std::array<Frames, kControlCount> fields_;
    std::shared_ptr<const ControlBounds> bounds_;
};

/// Quadratic cost weights, targets and baselines.
struct CostSpec {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    Frames r1;  // target density of language 1
    Frames r2;  // target density of language 2
    Frames r3;  // target status s1
    Frames r4;  // target status s2
    Frames b1;  // baseline growth rate beta1
    Frames b2;  // baseline growth rate beta2

    /// Reference value per control: b1, b2, r3, r4.
    const Frames& reference(int c) const;
};

void validate_cost(const CostSpec& cost, const SpaceTimeGrid& grid);

/// Baselines b1, b2 and targets r3, r4 clamped into the box.
ControlSet initial_controls(const CostSpec& cost, std::shared_ptr<const ControlBounds> bounds);
ControlSet lower_bound_controls(std::shared_ptr<const ControlBounds> bounds);
ControlSet upper_bound_controls(std::shared_ptr<const ControlBounds> bounds);

/// Box of constant bounds broadcast over the grid.
std::shared_ptr<const ControlBounds> constant_bounds(
    const SpaceTimeGrid& grid, const std::array<std::array<double, 2>, kControlCount>& box);

/// L2(Q_T) norm and distance over all four controls together.
double control_norm(const ControlSet& c, const SpaceTimeGrid& grid);
double control_distance(const ControlSet& a, const ControlSet& b, const SpaceTimeGrid& grid);

}  // namespace lcoc
