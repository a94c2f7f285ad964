#pragma once

#include <cmath>

#include "arw/vec3.hpp"

namespace arw {

constexpr double kPi = 3.14159265358979323846;

// Wrap an angle to [-pi, pi).
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

// Signed shortest angular difference b - a, in [-pi, pi).
inline double angle_diff(double b, double a) { return wrap_angle(b - a); }

// Robot viewpoint state: position plus heading.
struct Configuration {
  Vec3 position;
  double yaw = 0.0;  // radians, kept in [-pi, pi)

  Configuration() = default;
  Configuration(const Vec3& p, double yaw_) : position(p), yaw(wrap_angle(yaw_)) {}
  Configuration(double x, double y, double z, double yaw_)
      : position(x, y, z), yaw(wrap_angle(yaw_)) {}
};

}  // namespace arw
