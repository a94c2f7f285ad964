#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
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
namespace rrtot {

// Compact per-vertex coverage bitset.
class FaceBitset {
 public:
  FaceBitset() = default;
  explicit FaceBitset(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i >> 6] |= 1ULL << (i & 63); }
  bool test(std::size_t i) const { return words_[i >> 6] & (1ULL << (i & 63)); }
  std::size_t size() const { return n_; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }
  // |this & ~other|
  std::size_t count_new(const FaceBitset& other) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += static_cast<std::size_t>(__builtin_popcountll(words_[i] & ~other.words_[i]));
    return c;
  }
  void merge(const FaceBitset& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  }
  bool all() const { return count() == n_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct Params {
  double p_new = 0.1;        // tree-spawn probability
  double steer_limit = 1.0;  // m
  Aabb sampling_bounds;
  int tsp_restarts = 3;
};

// Connected forest of RRT*-style trees. Every tree root except the first
// coincides with a vertex of an earlier tree (a zero-cost crossing link).
class Forest {
 public:
  struct Vertex {
    Configuration config;
    int tree = 0;
    int parent = -1;      // within-tree parent (global vertex index)
    double edge_cost = 0.0;
    double cost = 0.0;    // cost-to-come from the tree root
    int root_host = -1;   // tree roots: coincident vertex in an earlier tree
    FaceBitset coverage;
    std::vector<int> children;
  };

  Forest(const Bvh& structure, const SensorModel& sensor, const VehicleModel& vehicle,
         const Bvh& world, const Params& params, const Configuration& start)
      : structure_(structure), sensor_(sensor), vehicle_(vehicle), world_(world),
        params_(params) {
    if (world_.segment_collides(start.position, start.position, vehicle_.clearance))
      throw StartInCollision();
    Vertex root;
    root.config = start;
    root.coverage = compute_coverage(start);
    vertices_.push_back(std::move(root));
    tree_vertices_.push_back({0});
  }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  std::size_t tree_count() const { return tree_vertices_.size(); }

  FaceBitset compute_coverage(const Configuration& config) const {
    FaceBitset bits(structure_.mesh().face_count());
    for (std::size_t f : visible_set(sensor_, config, structure_)) bits.set(f);
    return bits;
  }

  // One growth step: with probability p_new spawn a tree rooted at a uniform
  // existing vertex, otherwise extend a uniformly chosen tree by one vertex.
  void grow(int iterations, std::mt19937_64& rng) {
    for (int it = 0; it < iterations; ++it) {
      if (rng01(rng) < params_.p_new) {
        spawn_tree(rng);
      } else {
        int t = static_cast<int>(rng() % tree_vertices_.size());
        extend_tree(t, rng);
      }
    }
  }

  // Union of coverage over all vertices (what the forest could ever cover).
  FaceBitset reachable_coverage() const {
    FaceBitset all(structure_.mesh().face_count());
    for (const auto& v : vertices_) all.merge(v.coverage);
    return all;
  }

 private:
  static double rng01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }

  void spawn_tree(std::mt19937_64& rng) {
    int host = static_cast<int>(rng() % vertices_.size());
    Vertex root;
    root.config = vertices_[host].config;
    root.tree = static_cast<int>(tree_vertices_.size());
    root.root_host = host;
    root.coverage = vertices_[host].coverage;
    int idx = static_cast<int>(vertices_.size());
    vertices_.push_back(std::move(root));
    tree_vertices_.push_back({idx});
  }

  void extend_tree(int t, std::mt19937_64& rng) {
    const Aabb& b = params_.sampling_bounds;
    Configuration sample(b.lo.x + (b.hi.x - b.lo.x) * rng01(rng),
                         b.lo.y + (b.hi.y - b.lo.y) * rng01(rng),
                         b.lo.z + (b.hi.z - b.lo.z) * rng01(rng),
                         -kPi + 2.0 * kPi * rng01(rng));
    auto& members = tree_vertices_[t];
    int nearest = members[0];
    double nearest_d = kInf;
    for (int vi : members) {
      double d = dist(vertices_[vi].config.position, sample.position);
      if (d < nearest_d) { nearest_d = d; nearest = vi; }
    }
    Configuration from = vertices_[nearest].config;
    Configuration target = sample;
    double d = dist(from.position, sample.position);
    if (d > params_.steer_limit) {
      double s = params_.steer_limit / d;
      target.position = from.position + (sample.position - from.position) * s;
      target.yaw = wrap_angle(from.yaw + s * angle_diff(sample.yaw, from.yaw));
    }

    double n = static_cast<double>(members.size());
    double radius = std::max(params_.steer_limit,
                             2.0 * std::pow(std::log(n + 1.0) / (n + 1.0), 1.0 / 3.0) *
                                 params_.steer_limit * 2.0);
    int parent = -1;
    double best_cost = kInf;
    for (int vi : members) {
      if (dist(vertices_[vi].config.position, target.position) > radius) continue;
      auto leg = feasible_leg(vertices_[vi].config, target);
      if (!leg) continue;
      double c = vertices_[vi].cost + leg->cost;
      if (c < best_cost) { best_cost = c; parent = vi; }
    }
    if (parent < 0) return;  // extension failed; vertex count unchanged

    Vertex v;
    v.config = target;
    v.tree = t;
    v.parent = parent;
    v.cost = best_cost;
    v.edge_cost = best_cost - vertices_[parent].cost;
    v.coverage = compute_coverage(target);
    int idx = static_cast<int>(vertices_.size());
    vertices_.push_back(std::move(v));
    vertices_[parent].children.push_back(idx);
    members.push_back(idx);

    // Within-tree rewiring through the new vertex.
    for (int vi : members) {
      if (vi == idx || vi == parent || vertices_[vi].parent < 0) continue;
      if (dist(vertices_[vi].config.position, target.position) > radius) continue;
      auto leg = feasible_leg(target, vertices_[vi].config);
      if (!leg) continue;
      double c = best_cost + leg->cost;
      if (c < vertices_[vi].cost - 1e-12) {
        auto& kids = vertices_[vertices_[vi].parent].children;
        kids.erase(std::find(kids.begin(), kids.end(), vi));
        vertices_[vi].parent = idx;
        vertices_[vi].edge_cost = leg->cost;
        vertices_[idx].children.push_back(vi);
        shift_subtree(vi, c - vertices_[vi].cost);
      }
    }
  }

  void shift_subtree(int vi, double delta) {
    vertices_[vi].cost += delta;
    for (int c : vertices_[vi].children) shift_subtree(c, delta);
  }

  std::optional<LocalPath> feasible_leg(const Configuration& a, const Configuration& b) const {
    auto leg = connect(vehicle_, a, b);
    if (!leg || path_collides(world_, *leg, vehicle_.clearance)) return std::nullopt;
    return leg;
  }

  const Bvh& structure_;
  const SensorModel& sensor_;
  const VehicleModel& vehicle_;
  const Bvh& world_;
  Params params_;
  std::vector<Vertex> vertices_;
  std::vector<std::vector<int>> tree_vertices_;
};

namespace detail {

// Directed traversal graph over forest vertices: tree edges both ways plus
// zero-cost root crossing links.
struct ForestGraph {
  struct Edge { int to; double cost; };
  std::vector<std::vector<Edge>> adj;
};

inline ForestGraph build_graph(const Forest& forest, const VehicleModel& vehicle,
                               const Bvh& world) {
  const auto& vs = forest.vertices();
  ForestGraph g;
  g.adj.resize(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const auto& v = vs[i];
    if (v.parent >= 0) {
      g.adj[v.parent].push_back({static_cast<int>(i), v.edge_cost});
      if (vehicle.kind == VehicleKind::Holonomic) {
        // same segment backwards, symmetric cost
        g.adj[i].push_back({v.parent, v.edge_cost});
      } else {
        auto back = connect(vehicle, v.config, vs[v.parent].config);
        if (back && !path_collides(world, *back, vehicle.clearance))
          g.adj[i].push_back({v.parent, back->cost});
      }
    }
    if (v.root_host >= 0) {
      g.adj[i].push_back({v.root_host, 0.0});
      g.adj[v.root_host].push_back({static_cast<int>(i), 0.0});
    }
  }
  return g;
}

inline void dijkstra(const ForestGraph& g, int src, std::vector<double>& dist_out,
                     std::vector<int>& prev_out) {
  std::size_t n = g.adj.size();
  dist_out.assign(n, kInf);
  prev_out.assign(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist_out[src] = 0.0;
  pq.push({0.0, src});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist_out[u]) continue;
    for (const auto& e : g.adj[u]) {
      double nd = d + e.cost;
      if (nd < dist_out[e.to] - 1e-15) {
        dist_out[e.to] = nd;
        prev_out[e.to] = u;
        pq.push({nd, e.to});
      }
    }
  }
}

}  // namespace detail

// Cheapest covering walk found so far: greedy set cover over vertex coverage
// bitsets, tour ordering via solve_tour on within-forest (Dijkstra) distances,
// legs materialized as forest walks. Empty if the forest cannot cover yet.
inline std::optional<InspectionPath> extract_best_tour(const Forest& forest,
                                                       const VehicleModel& vehicle,
                                                       const Bvh& world,
                                                       const SensorModel& sensor,
                                                       const Bvh& structure,
                                                       int tsp_restarts = 3,
                                                       std::uint64_t seed = 0) {
  const auto& vs = forest.vertices();
  std::size_t n_faces = structure.mesh().face_count();

  // Greedy cover, ties to the lowest vertex index. Start vertex 0 is always
  // part of the walk.
  FaceBitset covered(n_faces);
  covered.merge(vs[0].coverage);
  std::vector<int> selected{0};
  while (covered.count() < n_faces) {
    int best = -1;
    std::size_t best_new = 0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      std::size_t nn = vs[i].coverage.count_new(covered);
      if (nn > best_new) { best_new = nn; best = static_cast<int>(i); }
    }
    if (best < 0) return std::nullopt;  // some face unseen by every vertex
    selected.push_back(best);
    covered.merge(vs[best].coverage);
  }

  auto graph = detail::build_graph(forest, vehicle, world);
  std::size_t m = selected.size();
  std::vector<std::vector<double>> d(m);
  std::vector<std::vector<int>> prev(m);
  for (std::size_t i = 0; i < m; ++i) detail::dijkstra(graph, selected[i], d[i], prev[i]);

  CostMatrix cm(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      cm.at(i, j) = i == j ? 0.0 : d[i][selected[j]];

  Tour tour;
  try {
    tour = solve_tour(cm, /*closed=*/false, tsp_restarts, seed, /*fixed_start=*/0);
  } catch (const Infeasible&) {
    return std::nullopt;  // selected vertices not mutually reachable yet
  }

  InspectionPath path;
  path.cost = tour.cost;
  if (!std::isfinite(tour.cost)) return std::nullopt;
  for (std::size_t k = 0; k < m; ++k)
    path.viewpoints.push_back(vs[selected[tour.order[k]]].config);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    std::size_t a = tour.order[k], b = tour.order[k + 1];
    std::vector<int> chain;
    for (int v = selected[b]; v != -1; v = prev[a][v]) chain.push_back(v);
    std::reverse(chain.begin(), chain.end());
    std::vector<Configuration> leg;
    for (int v : chain) leg.push_back(vs[v].config);
    path.legs.push_back(std::move(leg));
  }
  path.covered_faces = coverage_union(sensor, structure, flatten(path));
  return path;
}

struct PlanResult {
  InspectionPath path;
  std::vector<std::pair<int, double>> cost_history;  // (iteration, best cost)
  std::vector<std::size_t> uncoverable_faces;
};

// Alternates growth and tour extraction every `checkpoint` iterations; the
// recorded history is the best-so-far cost and is non-increasing.
inline PlanResult plan_optimal_inspection(const Bvh& structure, const SensorModel& sensor,
                                          const VehicleModel& vehicle, const Bvh& world,
                                          const Configuration& start, const Params& params,
                                          int budget_iterations, int checkpoint,
                                          std::uint64_t seed) {
  Forest forest(structure, sensor, vehicle, world, params, start);
  std::mt19937_64 rng(seed);
  PlanResult result;
  double best_cost = kInf;
  bool have_path = false;
  for (int done = 0; done < budget_iterations; done += checkpoint) {
    int step = std::min(checkpoint, budget_iterations - done);
    forest.grow(step, rng);
    auto tour = extract_best_tour(forest, vehicle, world, sensor, structure,
                                  params.tsp_restarts, seed + done);
    if (tour && tour->cost < best_cost) {
      best_cost = tour->cost;
      result.path = *tour;
      have_path = true;
    }
    result.cost_history.emplace_back(done + step, best_cost);
  }
  if (!have_path) {
    FaceBitset reach = forest.reachable_coverage();
    for (std::size_t f = 0; f < structure.mesh().face_count(); ++f)
      if (!reach.test(f)) result.uncoverable_faces.push_back(f);
    std::string faces;
    for (std::size_t f : result.uncoverable_faces) faces += " " + std::to_string(f);
    throw NoCoverageWithinBudget("uncovered faces:" + faces);
  }
  return result;
}

}  // namespace rrtot
}  // namespace arw
