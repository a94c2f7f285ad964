#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "arw/errors.hpp"
#include "arw/vec3.hpp"

namespace arw {

struct Aabb {
  Vec3 lo{std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi{-std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};

  void expand(const Vec3& p) {
    lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y); lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y); hi.z = std::max(hi.z, p.z);
  }
  void expand(const Aabb& b) { expand(b.lo); expand(b.hi); }

  Aabb inflated(double r) const {
    Aabb b;
    b.lo = lo - Vec3{r, r, r};
    b.hi = hi + Vec3{r, r, r};
    return b;
  }

  bool contains(const Vec3& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
           p.z >= lo.z && p.z <= hi.z;
  }

  Vec3 center() const { return (lo + hi) * 0.5; }
  Vec3 extent() const { return hi - lo; }
  bool valid() const { return lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z; }
};

struct Triangle {
  Vec3 v0, v1, v2;
  Vec3 normal;    // unit length
  Vec3 centroid;
  double area = 0.0;  // m^2

  Triangle() = default;
  Triangle(const Vec3& a, const Vec3& b, const Vec3& c) : v0(a), v1(b), v2(c) {
    Vec3 n = (v1 - v0).cross(v2 - v0);
    double n2 = n.norm();
    area = 0.5 * n2;
    normal = n2 > 0.0 ? n / n2 : Vec3{0, 0, 0};
    centroid = (v0 + v1 + v2) / 3.0;
  }

  bool degenerate(double min_area = 1e-12) const { return area <= min_area; }

  Aabb bounds() const {
    Aabb b;
    b.expand(v0); b.expand(v1); b.expand(v2);
    return b;
  }
};

class TriangleMesh {
 public:
  TriangleMesh() = default;

  explicit TriangleMesh(std::vector<Triangle> tris) : triangles_(std::move(tris)) {
    for (const auto& t : triangles_) bounds_.expand(t.bounds());
  }

  // Builds a mesh from raw triangles, dropping degenerates. Throws EmptyMesh
  // if nothing survives.
  static TriangleMesh from_triangles(const std::vector<Triangle>& tris,
                                     std::size_t* dropped = nullptr) {
    std::vector<Triangle> kept;
    kept.reserve(tris.size());
    std::size_t n_dropped = 0;
    for (const auto& t : tris) {
      if (t.degenerate()) { ++n_dropped; continue; }
      kept.push_back(t);
    }
    if (dropped) *dropped = n_dropped;
    if (kept.empty()) throw EmptyMesh("0 valid faces");
    return TriangleMesh(std::move(kept));
  }

  std::size_t face_count() const { return triangles_.size(); }
  const Triangle& face(std::size_t i) const { return triangles_[i]; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Aabb& bounds() const { return bounds_; }

  double total_area() const {
    double a = 0.0;
    for (const auto& t : triangles_) a += t.area;
    return a;
  }

 private:
  std::vector<Triangle> triangles_;
  Aabb bounds_;
};

}  // namespace arw
