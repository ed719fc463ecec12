#pragma once

#include <memory>

#include "lcoc/controls.hpp"
#include "lcoc/grid.hpp"
#include "lcoc/model.hpp"

namespace lcoc {

/// Everything needed to pose one control problem on a mesh.
struct Problem {
    SpaceTimeGrid grid;
    ModelParams params;
    CostSpec cost;
    std::shared_ptr<const ControlBounds> bounds;
};

}  // namespace lcoc
