#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "arw/geom_distance.hpp"
#include "arw/mesh.hpp"
#include "arw/vec3.hpp"

namespace arw {

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit
  double max_range = std::numeric_limits<double>::infinity();
};

struct Hit {
  double t = 0.0;       // meters along the ray
  std::size_t face = 0;
  Vec3 point;
};

// Self-intersection guard: hits closer than this are ignored.
constexpr double kRayEpsilon = 1e-6;

// Median-split bounding-volume hierarchy over mesh faces, leaf size 4.
// Query results are identical to an exhaustive per-triangle loop; the tree
// only prunes. Immutable after construction, safe for concurrent queries.
class Bvh {
 public:
  explicit Bvh(const TriangleMesh& mesh) : mesh_(&mesh) {
    std::size_t n = mesh.face_count();
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    nodes_.reserve(2 * n);
    if (n > 0) build(0, n);
  }

  const TriangleMesh& mesh() const { return *mesh_; }

  // Nearest intersection with t in (kRayEpsilon, max_range]; ties at equal t
  // go to the lowest face index.
  std::optional<Hit> ray_cast(const Ray& ray) const {
    if (nodes_.empty()) return std::nullopt;
    double best_t = std::numeric_limits<double>::infinity();
    std::size_t best_face = std::numeric_limits<std::size_t>::max();
    cast_node(0, ray, best_t, best_face);
    if (best_face == std::numeric_limits<std::size_t>::max()) return std::nullopt;
    return Hit{best_t, best_face, ray.origin + ray.direction * best_t};
  }

  // True iff any mesh point lies within `clearance` (+1e-6 slack) of [a,b].
  bool segment_collides(const Vec3& a, const Vec3& b, double clearance) const {
    if (nodes_.empty()) return false;
    return collide_node(0, a, b, clearance + 1e-6);
  }

  // Exact min distance from segment [a,b] to the mesh.
  double segment_distance(const Vec3& a, const Vec3& b) const {
    double best = std::numeric_limits<double>::infinity();
    if (!nodes_.empty()) distance_node(0, a, b, best);
    return best;
  }

 private:
  struct Node {
    Aabb box;
    std::int32_t left = -1;   // child node index, or -1 for leaf
    std::int32_t right = -1;
    std::uint32_t first = 0;  // leaf: range into order_
    std::uint32_t count = 0;
  };

  static constexpr std::size_t kLeafSize = 4;

  std::size_t build(std::size_t first, std::size_t count) {
    Node node;
    for (std::size_t i = 0; i < count; ++i)
      node.box.expand(mesh_->face(order_[first + i]).bounds());
    std::size_t idx = nodes_.size();
    nodes_.push_back(node);
    if (count <= kLeafSize) {
      nodes_[idx].first = static_cast<std::uint32_t>(first);
      nodes_[idx].count = static_cast<std::uint32_t>(count);
      return idx;
    }
    Vec3 ext = node.box.extent();
    int axis = 0;
    if (ext.y > ext.x) axis = 1;
    if (ext.z > (axis == 0 ? ext.x : ext.y)) axis = 2;
    auto key = [&](std::size_t f) {
      const Vec3& c = mesh_->face(f).centroid;
      return axis == 0 ? c.x : axis == 1 ? c.y : c.z;
    };
    std::size_t mid = count / 2;
    std::nth_element(order_.begin() + first, order_.begin() + first + mid,
                     order_.begin() + first + count,
                     [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    std::size_t l = build(first, mid);
    std::size_t r = build(first + mid, count - mid);
    nodes_[idx].left = static_cast<std::int32_t>(l);
    nodes_[idx].right = static_cast<std::int32_t>(r);
    return idx;
  }

  // Entry distance of the ray into `box`, or nothing on a miss. Inclusive
  // bounds so equal-t faces in sibling nodes are never pruned away.
  static std::optional<double> ray_box(const Ray& ray, const Aabb& box, double tmax_cap) {
    double tmin = 0.0, tmax = tmax_cap;
    const double* ov = &ray.origin.x;
    const double* dv = &ray.direction.x;
    const double* lov = &box.lo.x;
    const double* hiv = &box.hi.x;
    for (int i = 0; i < 3; ++i) {
      if (std::fabs(dv[i]) < 1e-15) {
        if (ov[i] < lov[i] || ov[i] > hiv[i]) return std::nullopt;
      } else {
        double inv = 1.0 / dv[i];
        double t1 = (lov[i] - ov[i]) * inv;
        double t2 = (hiv[i] - ov[i]) * inv;
        if (t1 > t2) std::swap(t1, t2);
        tmin = std::max(tmin, t1);
        tmax = std::min(tmax, t2);
        if (tmin > tmax) return std::nullopt;
      }
    }
    return tmin;
  }

  void cast_node(std::size_t ni, const Ray& ray, double& best_t, std::size_t& best_face) const {
    const Node& node = nodes_[ni];
    double cap = std::min(ray.max_range, best_t);
    if (!ray_box(ray, node.box, cap)) return;
    if (node.left < 0) {
      for (std::uint32_t i = 0; i < node.count; ++i) {
        std::size_t f = order_[node.first + i];
        auto t = ray_triangle(ray.origin, ray.direction, mesh_->face(f));
        if (!t || *t <= kRayEpsilon || *t > ray.max_range) continue;
        if (*t < best_t || (*t == best_t && f < best_face)) {
          best_t = *t;
          best_face = f;
        }
      }
      return;
    }
    cast_node(static_cast<std::size_t>(node.left), ray, best_t, best_face);
    cast_node(static_cast<std::size_t>(node.right), ray, best_t, best_face);
  }

  bool collide_node(std::size_t ni, const Vec3& a, const Vec3& b, double r) const {
    const Node& node = nodes_[ni];
    if (!segment_intersects_aabb(a, b, node.box.inflated(r))) return false;
    if (node.left < 0) {
      for (std::uint32_t i = 0; i < node.count; ++i) {
        std::size_t f = order_[node.first + i];
        if (segment_triangle_distance(a, b, mesh_->face(f)) <= r) return true;
      }
      return false;
    }
    return collide_node(static_cast<std::size_t>(node.left), a, b, r) ||
           collide_node(static_cast<std::size_t>(node.right), a, b, r);
  }

  void distance_node(std::size_t ni, const Vec3& a, const Vec3& b, double& best) const {
    const Node& node = nodes_[ni];
    if (!segment_intersects_aabb(a, b, node.box.inflated(best))) return;
    if (node.left < 0) {
      for (std::uint32_t i = 0; i < node.count; ++i) {
        std::size_t f = order_[node.first + i];
        best = std::min(best, segment_triangle_distance(a, b, mesh_->face(f)));
      }
      return;
    }
    distance_node(static_cast<std::size_t>(node.left), a, b, best);
    distance_node(static_cast<std::size_t>(node.right), a, b, best);
  }

  const TriangleMesh* mesh_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace arw
