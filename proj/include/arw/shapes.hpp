#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "arw/config.hpp"
#include "arw/mesh.hpp"

namespace arw {
namespace shapes {

// Axis-aligned box, 12 faces, normals outward.
inline TriangleMesh make_box(const Vec3& lo, const Vec3& hi) {
  auto v = [&](int i) {
    return Vec3{(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y, (i & 4) ? hi.z : lo.z};
  };
  // Quads as corner-index quadruples, CCW seen from outside.
  const int quads[6][4] = {
      {0, 2, 3, 1},  // z = lo (down)
      {4, 5, 7, 6},  // z = hi (up)
      {0, 1, 5, 4},  // y = lo
      {2, 6, 7, 3},  // y = hi
      {0, 4, 6, 2},  // x = lo
      {1, 3, 7, 5},  // x = hi
  };
  std::vector<Triangle> tris;
  for (const auto& q : quads) {
    tris.push_back(Triangle{v(q[0]), v(q[1]), v(q[2])});
    tris.push_back(Triangle{v(q[0]), v(q[2]), v(q[3])});
  }
  return TriangleMesh::from_triangles(tris);
}

inline TriangleMesh make_unit_cube() { return make_box({0, 0, 0}, {1, 1, 1}); }

// Box with normals pointing inward: a sealed room observed from inside.
inline TriangleMesh make_room(const Vec3& lo, const Vec3& hi) {
  TriangleMesh box = make_box(lo, hi);
  std::vector<Triangle> flipped;
  for (std::size_t f = 0; f < box.face_count(); ++f) {
    const Triangle& t = box.face(f);
    flipped.push_back(Triangle{t.v0, t.v2, t.v1});
  }
  return TriangleMesh::from_triangles(flipped);
}

// Closed cylinder around the z axis: `segments` side quads plus triangle fans
// on both caps, 4 * segments faces total (segments = 50 gives 200).
inline TriangleMesh make_cylinder(double radius, double height, int segments,
                                  const Vec3& base = {0, 0, 0}) {
  std::vector<Triangle> tris;
  Vec3 top_c = base + Vec3{0, 0, height};
  for (int i = 0; i < segments; ++i) {
    double a0 = 2.0 * kPi * i / segments;
    double a1 = 2.0 * kPi * (i + 1) / segments;
    Vec3 b0 = base + Vec3{radius * std::cos(a0), radius * std::sin(a0), 0};
    Vec3 b1 = base + Vec3{radius * std::cos(a1), radius * std::sin(a1), 0};
    Vec3 t0 = b0 + Vec3{0, 0, height};
    Vec3 t1 = b1 + Vec3{0, 0, height};
    tris.push_back(Triangle{b0, b1, t1});
    tris.push_back(Triangle{b0, t1, t0});
    tris.push_back(Triangle{base, b1, b0});     // bottom cap, normal -z
    tris.push_back(Triangle{top_c, t0, t1});    // top cap, normal +z
  }
  return TriangleMesh::from_triangles(tris);
}

// Icosphere: icosahedron subdivided `subdivisions` times, 20 * 4^n faces
// (n = 3 gives 1280), vertices projected to the radius.
inline TriangleMesh make_icosphere(double radius, int subdivisions,
                                   const Vec3& center = {0, 0, 0}) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : verts) v = v.normalized();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      std::pair<int, int> key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec3 m = ((verts[a] + verts[b]) * 0.5).normalized();
      verts.push_back(m);
      int idx = static_cast<int>(verts.size()) - 1;
      midpoint[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  std::vector<Triangle> tris;
  tris.reserve(faces.size());
  for (const auto& f : faces)
    tris.push_back(Triangle{center + verts[f[0]] * radius, center + verts[f[1]] * radius,
                            center + verts[f[2]] * radius});
  return TriangleMesh::from_triangles(tris);
}

}  // namespace shapes
}  // namespace arw
