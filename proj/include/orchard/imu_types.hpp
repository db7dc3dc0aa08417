#pragma once

#include "orchard/geometry.hpp"

namespace orchard {

struct ImuSample {
  double t = 0.0;
  Vec3 gyro{0, 0, 0};   // angular velocity, rad/s, body frame
  Vec3 accel{0, 0, 0};  // specific force, m/s^2, body frame

  bool finite() const { return std::isfinite(t) && gyro.allFinite() && accel.allFinite(); }
};

}  // namespace orchard
