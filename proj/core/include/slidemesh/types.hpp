#pragma once

#include <Eigen/Dense>

namespace slidemesh {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Axis-aligned rectangle, used by the structured mesh generator.
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace slidemesh
