#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "arw/bvh.hpp"
#include "arw/errors.hpp"
#include "arw/inspection_path.hpp"
#include "arw/rrt_star.hpp"
#include "arw/sensor_model.hpp"
#include "arw/tsp.hpp"
#include "arw/vehicle_model.hpp"

namespace arw {
namespace sip {

struct Params {
  int iterations = 10;
  int candidates_per_face = 60;  // N
  int tsp_restarts = 3;
  int rrt_iterations = 400;
};

struct Result {
  InspectionPath path;
  std::vector<double> cost_history;       // best-so-far per iteration
  std::vector<std::size_t> excluded_faces;
  std::vector<std::string> warnings;
};

namespace detail {

inline double rng01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Orthonormal basis completing `n`.
inline void tangent_basis(const Vec3& n, Vec3& u, Vec3& v) {
  Vec3 a = std::fabs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  u = n.cross(a).normalized();
  v = n.cross(u);
}

// One position draw inside the incidence-cone/range-band region above a face,
// with the yaw aimed at the centroid.
inline Configuration draw_candidate(const Triangle& face, const SensorModel& sensor,
                                    std::mt19937_64& rng) {
  double d = sensor.d_min + (sensor.d_max - sensor.d_min) * rng01(rng);
  double cos_lim = std::cos(sensor.max_incidence);
  double c = cos_lim + (1.0 - cos_lim) * rng01(rng);
  double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  double phi = 2.0 * kPi * rng01(rng);
  Vec3 u, v;
  tangent_basis(face.normal, u, v);
  Vec3 dir = face.normal * c + u * (s * std::cos(phi)) + v * (s * std::sin(phi));
  Vec3 pos = face.centroid + dir * d;
  Vec3 to_face = face.centroid - pos;
  return Configuration(pos, std::atan2(to_face.y, to_face.x));
}

}  // namespace detail

// Samples a viewpoint for one face: among up to N feasible draws, the one
// minimizing the sum of connect costs to the tour neighbors. The previous
// viewpoint (when feasible) competes as a candidate so a face's choice never
// regresses. Throws FaceInfeasible after 10*N draws with no feasible sample.
inline Configuration sample_viewpoint_for_face(
    const SensorModel& sensor, const VehicleModel& vehicle, const Bvh& structure,
    std::size_t face, const std::optional<Configuration>& previous,
    const std::vector<Configuration>& neighbors, std::mt19937_64& rng,
    int n_candidates = 60, const Bvh* world = nullptr) {
  // Feasible: the face is visible and the vehicle can occupy the position,
  // clear of the structure and of any surrounding world geometry.
  auto ok = [&](const Configuration& c) {
    return face_visible(sensor, c, structure, face) &&
           structure.segment_distance(c.position, c.position) > vehicle.clearance &&
           (!world ||
            world->segment_distance(c.position, c.position) > vehicle.clearance);
  };
  std::vector<Configuration> feasible;
  if (previous && ok(*previous)) feasible.push_back(*previous);
  int draws = 0;
  const int max_draws = 10 * n_candidates;
  while (static_cast<int>(feasible.size()) < n_candidates && draws < max_draws) {
    ++draws;
    Configuration cand = detail::draw_candidate(structure.mesh().face(face), sensor, rng);
    if (ok(cand)) feasible.push_back(cand);
  }
  if (feasible.empty()) throw FaceInfeasible(static_cast<int>(face));
  if (neighbors.empty()) return feasible.front();

  double best_cost = kInf;
  std::size_t best = 0;
  for (std::size_t i = 0; i < feasible.size(); ++i) {
    double c = 0.0;
    for (const auto& nb : neighbors) {
      auto leg = connect(vehicle, nb, feasible[i]);
      auto back = connect(vehicle, feasible[i], nb);
      c += leg ? leg->cost : kInf;
      c += back ? back->cost : kInf;
    }
    if (c < best_cost) { best_cost = c; best = i; }
  }
  return feasible[best];
}

namespace detail {

// Pairwise costs: direct local paths where collision-free, transitive closure
// (Floyd-Warshall) through other viewpoints otherwise. `via` reconstructs the
// intermediate viewpoint chain of closed entries.
struct CostGraph {
  CostMatrix matrix;
  std::vector<std::vector<int>> via;  // next-hop table, -1 = direct/none
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Configuration>> searched;
};

inline CostGraph build_cost_graph(const VehicleModel& vehicle, const Bvh& world,
                                  const std::vector<Configuration>& vps,
                                  int rrt_iterations, std::uint64_t seed) {
  std::size_t n = vps.size();
  CostGraph g{CostMatrix(n), std::vector<std::vector<int>>(n, std::vector<int>(n, -1)), {}};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      auto leg = try_direct(vehicle, world, vps[i], vps[j]);
      g.matrix.at(i, j) = leg ? leg->cost : kInf;
    }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      if (g.matrix.at(i, k) == kInf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        double c = g.matrix.at(i, k) + g.matrix.at(k, j);
        if (c < g.matrix.at(i, j)) {
          g.matrix.at(i, j) = c;
          g.via[i][j] = static_cast<int>(k);
        }
      }
    }
  // Tree search for pairs still disconnected after the closure.
  SearchParams sp;
  sp.bounds = world.mesh().bounds().inflated(2.0 * vehicle.clearance + 1.0);
  SearchBudget budget{rrt_iterations, 0.0};
  auto checker = mesh_collision_checker(world, vehicle.clearance);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || g.matrix.at(i, j) != kInf) continue;
      auto p = plan_point_to_point(vehicle, checker, vps[i], vps[j], sp, budget,
                                   seed ^ (i * 1000003 + j));
      if (!p) continue;
      g.matrix.at(i, j) = path_cost(vehicle, *p);
      g.via[i][j] = -2;  // marker: searched leg
      g.searched[{i, j}] = *p;
    }
  return g;
}

inline void expand_leg(const CostGraph& g, std::size_t i, std::size_t j,
                       const std::vector<Configuration>& vps,
                       std::vector<Configuration>& out) {
  int k = g.via[i][j];
  if (k == -2) {
    const auto& chain = g.searched.at({i, j});
    out.insert(out.end(), chain.begin() + 1, chain.end());
    return;
  }
  if (k < 0) {
    out.push_back(vps[j]);
    return;
  }
  expand_leg(g, i, static_cast<std::size_t>(k), vps, out);
  expand_leg(g, static_cast<std::size_t>(k), j, vps, out);
}

}  // namespace detail

// Alternating viewpoint resampling and tour optimization. Keeps the best path
// found; the cost history is non-increasing. Deterministic given seed.
inline Result plan_inspection(const Bvh& structure, const SensorModel& sensor,
                              const VehicleModel& vehicle, const Bvh& world,
                              const Params& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::size_t n_faces = structure.mesh().face_count();

  Result result;
  std::vector<std::size_t> active;  // faces with feasible viewpoints
  std::vector<Configuration> vps;   // aligned with `active`
  for (std::size_t f = 0; f < n_faces; ++f) {
    try {
      vps.push_back(sample_viewpoint_for_face(sensor, vehicle, structure, f, std::nullopt,
                                              {}, rng, params.candidates_per_face, &world));
      active.push_back(f);
    } catch (const FaceInfeasible&) {
      result.excluded_faces.push_back(f);
      result.warnings.push_back("face " + std::to_string(f) + " excluded: no feasible viewpoint");
    }
  }
  if (active.empty()) throw NoFeasibleSolution("no face has a feasible viewpoint");
  std::size_t n = active.size();

  if (n == 1) {
    result.path.viewpoints = {vps[0]};
    result.path.cost = 0.0;
    result.path.covered_faces = coverage_union(sensor, structure, result.path.viewpoints);
    result.cost_history.push_back(0.0);
    return result;
  }

  // Initial order: nearest-neighbor on face centroids.
  std::vector<std::size_t> order;
  {
    CostMatrix cm(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        cm.at(i, j) = dist(structure.mesh().face(active[i]).centroid,
                           structure.mesh().face(active[j]).centroid);
    order = arw::detail::nearest_neighbor(cm, 0);
  }

  double best_cost = kInf;
  std::vector<Configuration> best_vps;
  std::vector<std::size_t> best_order;
  detail::CostGraph best_graph{CostMatrix(0), {}};

  for (int iter = 0; iter < params.iterations; ++iter) {
    if (iter > 0) {
      // Neighbor-aware resampling against the current tour order.
      std::vector<std::size_t> pos(n);
      for (std::size_t k = 0; k < n; ++k) pos[order[k]] = k;
      std::vector<Configuration> next = vps;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = pos[i];
        std::vector<Configuration> nbrs{vps[order[(k + n - 1) % n]],
                                        vps[order[(k + 1) % n]]};
        next[i] = sample_viewpoint_for_face(sensor, vehicle, structure, active[i], vps[i],
                                            nbrs, rng, params.candidates_per_face, &world);
      }
      vps = next;
    }

    auto graph = detail::build_cost_graph(vehicle, world, vps, params.rrt_iterations, seed + 7919 * iter);
    Tour tour;
    try {
      tour = solve_tour(graph.matrix, /*closed=*/true, params.tsp_restarts, seed + iter);
    } catch (const Infeasible&) {
      throw NoPathWithinBudget();
    }
    order = tour.order;
    if (tour.cost < best_cost) {
      best_cost = tour.cost;
      best_vps = vps;
      best_order = order;
      best_graph = graph;
    }
    result.cost_history.push_back(best_cost);
  }

  // Materialize the best tour: each leg is the chain of direct hops from the
  // transitive closure.
  InspectionPath& path = result.path;
  for (std::size_t k = 0; k < n; ++k) path.viewpoints.push_back(best_vps[best_order[k]]);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t i = best_order[k], j = best_order[(k + 1) % n];
    std::vector<Configuration> leg{best_vps[i]};
    detail::expand_leg(best_graph, i, j, best_vps, leg);
    path.legs.push_back(std::move(leg));
  }
  path.cost = best_cost;
  path.covered_faces = coverage_union(sensor, structure, path.viewpoints);
  return result;
}

}  // namespace sip
}  // namespace arw
