#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "arw/bvh.hpp"
#include "arw/config.hpp"
#include "arw/errors.hpp"
#include "arw/tsp.hpp"
#include "arw/vehicle_model.hpp"

namespace arw {

// True iff the local path is in collision.
using CollisionFn = std::function<bool(const LocalPath&)>;

inline CollisionFn mesh_collision_checker(const Bvh& world, double clearance) {
  return [&world, clearance](const LocalPath& path) {
    return path_collides(world, path, clearance);
  };
}

struct SearchBudget {
  int max_iterations = 2000;
  double max_seconds = 0.0;  // <= 0: no time limit
};

struct SearchParams {
  Aabb bounds;                 // position sampling box
  double goal_tolerance_pos = 0.05;  // m
  double goal_tolerance_yaw = 0.1;   // rad
  double steer_limit = 1.0;          // m
  double goal_bias = 0.05;
  bool stop_at_first = false;  // return the first admissible path (plain RRT)
};

namespace detail {

inline double config_dist(const Configuration& a, const Configuration& b) {
  return dist(a.position, b.position) + 0.2 * std::fabs(angle_diff(b.yaw, a.yaw));
}

}  // namespace detail

// Collision-free point-to-point planning with RRT*-style rewiring. Neighbor
// radius gamma*(log n / n)^(1/3) with gamma from the sampling-volume
// heuristic. Deterministic given the seed.
inline std::optional<std::vector<Configuration>> plan_point_to_point(
    const VehicleModel& vehicle, const CollisionFn& collides,
    const Configuration& start, const Configuration& goal,
    const SearchParams& params, const SearchBudget& budget, std::uint64_t seed) {
  {
    LocalPath point;
    point.start = point.end = start;
    point.waypoints = {start, start};
    if (collides(point)) throw StartInCollision();
  }

  struct Vertex {
    Configuration config;
    int parent = -1;
    double cost = 0.0;
    std::vector<int> children;
  };
  std::vector<Vertex> tree{{start, -1, 0.0, {}}};

  // Rewiring shifts whole subtrees; keep stored cost-to-come exact.
  std::function<void(int, double)> shift_subtree = [&](int idx, double delta) {
    tree[idx].cost += delta;
    for (int c : tree[idx].children) shift_subtree(c, delta);
  };

  Vec3 ext = params.bounds.extent();
  double volume = std::max(ext.x, 1e-3) * std::max(ext.y, 1e-3) * std::max(ext.z, 1e-3);
  const double unit_ball = 4.0 / 3.0 * kPi;
  double gamma = 2.0 * std::pow(1.0 + 1.0 / 3.0, 1.0 / 3.0) *
                 std::pow(volume / unit_ball, 1.0 / 3.0);

  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };

  double best_cost = kInf;
  int best_leaf = -1;  // vertex from which goal is reached directly

  auto feasible_leg = [&](const Configuration& a, const Configuration& b)
      -> std::optional<LocalPath> {
    auto leg = connect(vehicle, a, b);
    if (!leg || collides(*leg)) return std::nullopt;
    return leg;
  };

  // Direct connection first; it is also the best-so-far baseline.
  if (auto leg = feasible_leg(start, goal)) {
    best_cost = leg->cost;
    best_leaf = 0;
    if (params.stop_at_first) return std::vector<Configuration>{start, goal};
  }

  auto t0 = std::chrono::steady_clock::now();
  for (int iter = 0; iter < budget.max_iterations; ++iter) {
    if (budget.max_seconds > 0.0) {
      double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (el > budget.max_seconds) break;
    }

    Configuration sample;
    if (uniform(0.0, 1.0) < params.goal_bias) {
      sample = goal;
    } else {
      sample = Configuration(uniform(params.bounds.lo.x, params.bounds.hi.x),
                             uniform(params.bounds.lo.y, params.bounds.hi.y),
                             uniform(params.bounds.lo.z, params.bounds.hi.z),
                             uniform(-kPi, kPi));
    }

    // Nearest vertex, then steer toward the sample.
    int nearest = 0;
    double nearest_d = kInf;
    for (std::size_t i = 0; i < tree.size(); ++i) {
      double d = detail::config_dist(tree[i].config, sample);
      if (d < nearest_d) { nearest_d = d; nearest = static_cast<int>(i); }
    }
    Configuration from = tree[nearest].config;
    Configuration target = sample;
    double d = dist(from.position, sample.position);
    if (d > params.steer_limit) {
      double s = params.steer_limit / d;
      target.position = from.position + (sample.position - from.position) * s;
      target.yaw = wrap_angle(from.yaw + s * angle_diff(sample.yaw, from.yaw));
    }

    // Neighbor set within the shrinking RRT* radius (directional costs).
    double n = static_cast<double>(tree.size());
    double radius = std::max(gamma * std::pow(std::log(n + 1.0) / (n + 1.0), 1.0 / 3.0),
                             params.steer_limit);
    int parent = -1;
    double new_cost = kInf;
    std::vector<int> neighbors;
    for (std::size_t i = 0; i < tree.size(); ++i) {
      if (dist(tree[i].config.position, target.position) > radius) continue;
      neighbors.push_back(static_cast<int>(i));
    }
    if (neighbors.empty()) neighbors.push_back(nearest);
    for (int i : neighbors) {
      auto leg = feasible_leg(tree[i].config, target);
      if (!leg) continue;
      double c = tree[i].cost + leg->cost;
      if (c < new_cost) { new_cost = c; parent = i; }
    }
    if (parent < 0) continue;

    int new_idx = static_cast<int>(tree.size());
    tree.push_back({target, parent, new_cost, {}});
    tree[parent].children.push_back(new_idx);

    // Rewire neighbors through the new vertex.
    for (int i : neighbors) {
      if (i == parent || i == 0) continue;
      auto leg = feasible_leg(target, tree[i].config);
      if (!leg) continue;
      double c = new_cost + leg->cost;
      if (c < tree[i].cost - 1e-12) {
        auto& old_kids = tree[tree[i].parent].children;
        old_kids.erase(std::find(old_kids.begin(), old_kids.end(), i));
        tree[i].parent = new_idx;
        tree[new_idx].children.push_back(i);
        shift_subtree(i, c - tree[i].cost);
      }
    }

    // Goal connection from the new vertex.
    bool at_goal = dist(target.position, goal.position) <= params.goal_tolerance_pos &&
                   std::fabs(angle_diff(goal.yaw, target.yaw)) <= params.goal_tolerance_yaw;
    double total = kInf;
    if (at_goal) {
      total = new_cost;
    } else if (auto leg = feasible_leg(target, goal)) {
      total = new_cost + leg->cost;
    }
    if (total < best_cost) {
      best_cost = total;
      best_leaf = new_idx;
      if (params.stop_at_first) break;
    }
  }

  if (best_leaf < 0) return std::nullopt;

  std::vector<Configuration> path;
  for (int i = best_leaf; i >= 0; i = tree[i].parent) path.push_back(tree[i].config);
  std::reverse(path.begin(), path.end());
  if (detail::config_dist(path.back(), goal) > 1e-12) path.push_back(goal);
  return path;
}

// Fast path before invoking the tree search: the direct local connection if
// it is collision-free.
inline std::optional<LocalPath> try_direct(const VehicleModel& vehicle,
                                           const CollisionFn& collides,
                                           const Configuration& a, const Configuration& b) {
  auto leg = connect(vehicle, a, b);
  if (!leg || collides(*leg)) return std::nullopt;
  return leg;
}

inline std::optional<LocalPath> try_direct(const VehicleModel& vehicle, const Bvh& world,
                                           const Configuration& a, const Configuration& b) {
  return try_direct(vehicle, mesh_collision_checker(world, vehicle.clearance), a, b);
}

}  // namespace arw
