#pragma once

#include <cstddef>
#include <set>
#include <vector>

#include "arw/bvh.hpp"
#include "arw/config.hpp"
#include "arw/sensor_model.hpp"
#include "arw/vehicle_model.hpp"

namespace arw {

// Ordered viewpoints plus the waypoint-level route connecting them.
struct InspectionPath {
  std::vector<Configuration> viewpoints;        // tour order
  std::vector<std::vector<Configuration>> legs; // via-configs per leg (incl. endpoints)
  double cost = 0.0;                            // s
  std::set<std::size_t> covered_faces;
};

inline std::set<std::size_t> coverage_union(const SensorModel& sensor, const Bvh& bvh,
                                            const std::vector<Configuration>& viewpoints) {
  std::set<std::size_t> covered;
  for (const auto& vp : viewpoints)
    for (std::size_t f : visible_set(sensor, vp, bvh)) covered.insert(f);
  return covered;
}

// Flattened configuration sequence (viewpoints plus leg via-points).
inline std::vector<Configuration> flatten(const InspectionPath& path) {
  std::vector<Configuration> out;
  if (path.viewpoints.empty()) return out;
  if (path.legs.empty()) return path.viewpoints;
  out.push_back(path.viewpoints.front());
  for (const auto& leg : path.legs)
    for (std::size_t i = 1; i < leg.size(); ++i) out.push_back(leg[i]);
  return out;
}

}  // namespace arw
