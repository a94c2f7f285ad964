#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "arw/bvh.hpp"
#include "arw/config.hpp"
#include "arw/dubins.hpp"

namespace arw {

enum class VehicleKind { Holonomic, Nonholonomic };

struct VehicleModel {
  VehicleKind kind = VehicleKind::Holonomic;
  double v_max = 0.25;         // m/s
  double yaw_rate_max = 0.5;   // rad/s
  double clearance = 0.3;      // collision radius, m

  double turn_radius() const { return v_max / yaw_rate_max; }
};

// Local path between two configurations: waypoints at <= 0.05 m spacing and
// a time cost in seconds.
struct LocalPath {
  Configuration start, end;
  std::vector<Configuration> waypoints;  // begins at start, ends at end
  double cost = 0.0;                     // s
};

constexpr double kWaypointSpacing = 0.05;  // m

// Holonomic: straight segment, yaw interpolated along it; translation and yaw
// run concurrently so cost is the max of the two times.
// Nonholonomic: planar Dubins at the vehicle turn radius with linear altitude,
// yaw tangent to the path; endpoint headings must match the configurations.
inline std::optional<LocalPath> connect(const VehicleModel& vehicle,
                                        const Configuration& a, const Configuration& b) {
  LocalPath path;
  path.start = a;
  path.end = b;

  if (vehicle.kind == VehicleKind::Holonomic) {
    double d = dist(a.position, b.position);
    double dyaw = angle_diff(b.yaw, a.yaw);
    path.cost = std::max(d / vehicle.v_max, std::fabs(dyaw) / vehicle.yaw_rate_max);
    int n = std::max({static_cast<int>(std::ceil(d / kWaypointSpacing)),
                      static_cast<int>(std::ceil(std::fabs(dyaw) / 0.1)), 1});
    path.waypoints.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
      double s = static_cast<double>(i) / n;
      path.waypoints.emplace_back(a.position + (b.position - a.position) * s,
                                  a.yaw + s * dyaw);
    }
    path.waypoints.front() = a;
    path.waypoints.back() = b;
    return path;
  }

  double rho = vehicle.turn_radius();
  auto dp = dubins::shortest(a.position.x, a.position.y, a.yaw,
                             b.position.x, b.position.y, b.yaw, rho);
  if (!dp) return std::nullopt;
  double lh = dp->length();
  double dz = b.position.z - a.position.z;
  double l3 = std::sqrt(lh * lh + dz * dz);
  path.cost = l3 / vehicle.v_max;
  if (l3 <= 1e-12) {
    path.cost = 0.0;
    path.waypoints = {a, b};
    return path;
  }
  int n = std::max(static_cast<int>(std::ceil(l3 / kWaypointSpacing)), 1);
  path.waypoints.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    double s = lh * i / n;
    auto q = dp->sample(s);
    path.waypoints.emplace_back(Vec3{q[0], q[1], a.position.z + dz * i / n}, q[2]);
  }
  path.waypoints.front() = a;
  path.waypoints.back() = b;
  return path;
}

// Sum of connect costs over consecutive pairs; +inf if any pair is infeasible.
inline double path_cost(const VehicleModel& vehicle,
                        const std::vector<Configuration>& path) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    auto leg = connect(vehicle, path[i], path[i + 1]);
    if (!leg) return std::numeric_limits<double>::infinity();
    total += leg->cost;
  }
  return total;
}

// A LocalPath is in collision iff any consecutive waypoint segment comes
// within the vehicle clearance of the mesh.
inline bool path_collides(const Bvh& world, const LocalPath& path, double clearance) {
  for (std::size_t i = 0; i + 1 < path.waypoints.size(); ++i)
    if (world.segment_collides(path.waypoints[i].position,
                               path.waypoints[i + 1].position, clearance))
      return true;
  return false;
}

}  // namespace arw
