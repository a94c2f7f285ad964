#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "arw/config.hpp"
#include "arw/errors.hpp"
#include "arw/tsp.hpp"
#include "arw/vec3.hpp"

namespace arw {
namespace contact {

struct Point2 {
  double x = 0.0, y = 0.0;
  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  double norm() const { return std::hypot(x, y); }
};

inline double cross2(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }

using Polygon = std::vector<Point2>;  // simple, no self-intersections

// Planar surface inspection task: user-selected points of interest in surface
// coordinates, obstacle polygons on the plane, and the two travel modes.
struct SurfaceTask {
  Vec3 plane_point;
  Vec3 plane_normal;           // unit
  Vec3 plane_u, plane_v;       // in-plane basis
  std::vector<Point2> pois;
  std::vector<Polygon> obstacles;
  double undock_clearance = 0.3;  // m
  double contact_speed = 0.1;     // m/s
  double flight_speed = 0.5;      // m/s

  Vec3 to_world(const Point2& s) const {
    return plane_point + plane_u * s.x + plane_v * s.y;
  }
};

inline SurfaceTask make_wall_task(const Vec3& point, const Vec3& normal) {
  SurfaceTask t;
  t.plane_point = point;
  t.plane_normal = normal.normalized();
  Vec3 a = std::fabs(t.plane_normal.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  t.plane_u = t.plane_normal.cross(a).normalized();
  t.plane_v = t.plane_normal.cross(t.plane_u);
  return t;
}

enum class LegMode { InContact, UndockRedock };

namespace detail {

inline bool point_strictly_inside(const Point2& p, const Polygon& poly) {
  bool inside = false;
  std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    // On-boundary points count as outside (touching is allowed).
    Point2 e = poly[i] - poly[j];
    Point2 w = p - poly[j];
    double c = cross2(e, w);
    double dot = w.x * e.x + w.y * e.y;
    if (std::fabs(c) < 1e-12 && dot >= -1e-12 && dot <= e.x * e.x + e.y * e.y + 1e-12)
      return false;
    if ((poly[i].y > p.y) != (poly[j].y > p.y)) {
      double t = (p.y - poly[j].y) / (poly[i].y - poly[j].y);
      if (poly[j].x + t * (poly[i].x - poly[j].x) > p.x) inside = !inside;
    }
  }
  return inside;
}

inline bool proper_intersect(const Point2& a, const Point2& b, const Point2& c,
                             const Point2& d) {
  double d1 = cross2(b - a, c - a);
  double d2 = cross2(b - a, d - a);
  double d3 = cross2(d - c, a - c);
  double d4 = cross2(d - c, b - c);
  const double eps = 1e-12;
  return ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
         ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps));
}

// A segment crosses an obstacle iff it properly intersects an edge or any
// interior sample point lies strictly inside (catches through-vertex paths).
inline bool segment_blocked(const Point2& a, const Point2& b,
                            const std::vector<Polygon>& obstacles) {
  for (const auto& poly : obstacles) {
    std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
      if (proper_intersect(a, b, poly[j], poly[i])) return true;
    for (int k = 1; k < 16; ++k) {
      Point2 p = a + (b - a) * (static_cast<double>(k) / 16.0);
      if (point_strictly_inside(p, poly)) return true;
    }
  }
  return false;
}

// Shortest obstacle-avoiding path on the plane via the visibility graph over
// obstacle vertices. Returns the polyline (including endpoints) or nothing.
inline std::optional<std::vector<Point2>> plane_shortest_path(
    const Point2& from, const Point2& to, const std::vector<Polygon>& obstacles) {
  std::vector<Point2> nodes{from, to};
  for (const auto& poly : obstacles)
    for (const auto& v : poly) nodes.push_back(v);

  std::size_t n = nodes.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (segment_blocked(nodes[i], nodes[j], obstacles)) continue;
      double d = (nodes[j] - nodes[i]).norm();
      adj[i].push_back({j, d});
      adj[j].push_back({i, d});
    }

  std::vector<double> dist(n, kInf);
  std::vector<int> prev(n, -1);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[0] = 0.0;
  pq.push({0.0, 0});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (auto [v, w] : adj[u]) {
      if (d + w < dist[v] - 1e-15) {
        dist[v] = d + w;
        prev[v] = static_cast<int>(u);
        pq.push({dist[v], v});
      }
    }
  }
  if (dist[1] == kInf) return std::nullopt;
  std::vector<Point2> path;
  for (int v = 1; v != -1; v = prev[v]) path.push_back(nodes[v]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace detail

struct Leg {
  std::size_t from = 0, to = 0;  // POI indices
  LegMode mode = LegMode::InContact;
  double cost = 0.0;             // s
  std::vector<Vec3> waypoints;   // world frame
};

// Cheaper of staying in contact (visibility-graph detour) and undock/redock
// (clearance hop over the surface).
inline Leg leg_cost(const SurfaceTask& task, std::size_t from, std::size_t to) {
  const Point2& p = task.pois[from];
  const Point2& q = task.pois[to];

  Leg fly;
  fly.from = from;
  fly.to = to;
  fly.mode = LegMode::UndockRedock;
  fly.cost = (2.0 * task.undock_clearance + (q - p).norm()) / task.flight_speed;
  Vec3 off = task.plane_normal * task.undock_clearance;
  fly.waypoints = {task.to_world(p), task.to_world(p) + off, task.to_world(q) + off,
                   task.to_world(q)};

  auto surf = detail::plane_shortest_path(p, q, task.obstacles);
  if (!surf) return fly;
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < surf->size(); ++i)
    len += ((*surf)[i + 1] - (*surf)[i]).norm();
  Leg walk;
  walk.from = from;
  walk.to = to;
  walk.mode = LegMode::InContact;
  walk.cost = len / task.contact_speed;
  for (const auto& s : *surf) walk.waypoints.push_back(task.to_world(s));

  return walk.cost <= fly.cost ? walk : fly;
}

struct TourResult {
  std::vector<Leg> legs;
  std::vector<std::size_t> order;  // POI visit order, starts at start_poi
  double total_cost = 0.0;
};

// Open tour over the POIs from a fixed start, cheaper-mode cost matrix.
inline TourResult plan_contact_tour(const SurfaceTask& task, std::size_t start_poi,
                                    int tsp_restarts = 5, std::uint64_t seed = 0) {
  std::size_t n = task.pois.size();
  TourResult result;
  if (n == 0) throw Infeasible("no points of interest");
  if (n == 1) {
    result.order = {start_poi};
    return result;
  }

  std::vector<std::vector<Leg>> legs(n, std::vector<Leg>(n));
  CostMatrix cm(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      legs[i][j] = leg_cost(task, i, j);
      cm.at(i, j) = legs[i][j].cost;
    }

  Tour tour = solve_tour(cm, /*closed=*/false, tsp_restarts, seed, start_poi);
  result.order = tour.order;
  result.total_cost = tour.cost;
  for (std::size_t k = 0; k + 1 < n; ++k)
    result.legs.push_back(legs[tour.order[k]][tour.order[k + 1]]);
  return result;
}

}  // namespace contact
}  // namespace arw
