#pragma once

#include <string>

#include "wallfinder/errors.hpp"

namespace wallfinder {

// Axis-aligned rectangular arena. Origin at the bottom-left corner, x grows
// right, y grows up. All walls are solid.
struct WorldConfig {
  double width_mm = 2000.0;
  double height_mm = 2000.0;

  void validate(double robot_radius_mm) const {
    if (width_mm <= 4.0 * robot_radius_mm ||
        height_mm <= 4.0 * robot_radius_mm) {
      throw RangeError("world " + std::to_string(width_mm) + "x" +
                       std::to_string(height_mm) +
                       " too small for robot radius " +
                       std::to_string(robot_radius_mm));
    }
  }
};

}  // namespace wallfinder
