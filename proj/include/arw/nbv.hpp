#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "arw/bvh.hpp"
#include "arw/config.hpp"
#include "arw/errors.hpp"
#include "arw/occupancy_map.hpp"
#include "arw/sensor_model.hpp"
#include "arw/tsp.hpp"
#include "arw/vehicle_model.hpp"

namespace arw {
namespace nbv {

struct Params {
  int tree_nodes = 60;       // N
  double max_edge = 1.0;     // m
  double lambda = 0.25;      // 1/s, gain discount on cost-to-come
  double g_min = 0.05;       // m^3, termination threshold on branch value
  int max_steps = 200;
  int scan_rays_h = 48;
  int scan_rays_v = 24;
};

// Expected newly explored volume: unknown voxels visible from `config` times
// the voxel volume.
inline double node_gain(const OccupancyMap& map, const Configuration& config,
                        const SensorModel& sensor) {
  double vol = std::pow(map.resolution(), 3);
  return static_cast<double>(map.count_unknown_visible(config, sensor)) * vol;
}

struct ViewNode {
  Configuration config;
  int parent = -1;
  double cost_to_come = 0.0;  // s, from the root
  double gain = 0.0;          // m^3
  double value = 0.0;         // branch value at this node
};

using GainFn = std::function<double(const OccupancyMap&, const Configuration&,
                                    const SensorModel&)>;

// True iff the straight segment stays in Free voxels (Unknown and Occupied
// are non-traversable).
inline bool segment_in_free_space(const OccupancyMap& map, const Vec3& a, const Vec3& b) {
  double step = map.resolution() * 0.5;
  double len = dist(a, b);
  int n = std::max(static_cast<int>(std::ceil(len / step)), 1);
  for (int i = 0; i <= n; ++i) {
    Vec3 p = a + (b - a) * (static_cast<double>(i) / n);
    if (map.state_at(p) != VoxelState::Free) return false;
  }
  return true;
}

// RRT-style tree of views in currently-Free space. Branch value is
// value(parent) + gain(n) * exp(-lambda * cost_to_come(n)). Best effort when
// free space is too small for N nodes.
inline std::vector<ViewNode> build_view_tree(const OccupancyMap& map,
                                             const VehicleModel& vehicle,
                                             const SensorModel& sensor,
                                             const Configuration& root,
                                             const Params& params, std::mt19937_64& rng,
                                             const GainFn& gain_fn = node_gain) {
  if (map.state_at(root.position) != VoxelState::Free) throw RootNotFree();
  auto rng01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  std::vector<ViewNode> tree;
  ViewNode root_node;
  root_node.config = root;
  root_node.gain = gain_fn(map, root, sensor);
  root_node.value = root_node.gain;
  tree.push_back(root_node);

  const Vec3 lo = map.params().lo, hi = map.params().hi;
  int attempts = 0;
  const int max_attempts = 300 * params.tree_nodes;
  while (static_cast<int>(tree.size()) < params.tree_nodes && attempts < max_attempts) {
    ++attempts;
    Vec3 p{lo.x + (hi.x - lo.x) * rng01(), lo.y + (hi.y - lo.y) * rng01(),
           lo.z + (hi.z - lo.z) * rng01()};
    double yaw = -kPi + 2.0 * kPi * rng01();
    if (map.state_at(p) != VoxelState::Free) continue;

    int nearest = 0;
    double nearest_d = kInf;
    for (std::size_t i = 0; i < tree.size(); ++i) {
      double d = dist(tree[i].config.position, p);
      if (d < nearest_d) { nearest_d = d; nearest = static_cast<int>(i); }
    }
    Vec3 from = tree[nearest].config.position;
    double d = dist(from, p);
    if (d > params.max_edge) {
      p = from + (p - from) * (params.max_edge / d);
      if (map.state_at(p) != VoxelState::Free) continue;
    }
    if (!segment_in_free_space(map, from, p)) continue;

    Configuration config(p, yaw);
    auto leg = connect(vehicle, tree[nearest].config, config);
    if (!leg) continue;

    ViewNode node;
    node.config = config;
    node.parent = nearest;
    node.cost_to_come = tree[nearest].cost_to_come + leg->cost;
    node.gain = gain_fn(map, config, sensor);
    node.value = tree[nearest].value + node.gain * std::exp(-params.lambda * node.cost_to_come);
    tree.push_back(node);
  }
  return tree;
}

// Index of the node with the highest branch value (ties to lowest index).
inline int best_branch(const std::vector<ViewNode>& tree) {
  int best = 0;
  for (std::size_t i = 1; i < tree.size(); ++i)
    if (tree[i].value > tree[best].value) best = static_cast<int>(i);
  return best;
}

// First vertex after the root on the branch ending at `node`.
inline int first_vertex_of_branch(const std::vector<ViewNode>& tree, int node) {
  int cur = node;
  while (cur > 0 && tree[cur].parent > 0) cur = tree[cur].parent;
  return cur;
}

struct LogRow {
  int step = 0;
  Configuration config;
  double gain = 0.0;            // best branch value at this step
  double known_fraction = 0.0;  // after the scan at `config`
};

struct ExploreResult {
  std::vector<LogRow> log;
  OccupancyMap map;
  std::string termination;  // "gain", "max_steps", "stuck"
};

// Receding-horizon exploration loop: scan, plan a tree of views, execute only
// the first edge of the best branch, repeat.
inline ExploreResult explore(const Bvh& world, const Configuration& start,
                             const SensorModel& sensor, const VehicleModel& vehicle,
                             const OccupancyMap::Params& map_params, const Params& params,
                             std::uint64_t seed) {
  ExploreResult result{{}, OccupancyMap(map_params), ""};
  OccupancyMap& map = result.map;
  Configuration config = start;

  for (int step = 0; step < params.max_steps; ++step) {
    auto scan = simulate_scan(sensor, config, world, params.scan_rays_h, params.scan_rays_v);
    map.integrate_scan(config.position, scan, sensor.d_max);

    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(step + 1));
    std::vector<ViewNode> tree;
    try {
      tree = build_view_tree(map, vehicle, sensor, config, params, rng);
    } catch (const RootNotFree&) {
      result.log.push_back({step, config, 0.0, map.known_fraction()});
      result.termination = "stuck";
      return result;
    }
    int best = best_branch(tree);
    result.log.push_back({step, config, tree[best].value, map.known_fraction()});

    if (tree[best].value < params.g_min) {
      result.termination = "gain";
      return result;
    }
    if (tree.size() < 2 || best == 0) {
      result.termination = "stuck";
      return result;
    }
    config = tree[first_vertex_of_branch(tree, best)].config;
  }
  result.termination = "max_steps";
  return result;
}

}  // namespace nbv
}  // namespace arw
