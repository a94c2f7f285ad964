#pragma once

#include <cstdlib>
#include <optional>
#include <random>
#include <string>

#include "arw/bvh.hpp"
#include "arw/mesh.hpp"
#include "arw/shapes.hpp"

namespace test {

inline double rng01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::string asset_dir() {
  const char* d = std::getenv("ARW_ASSET_DIR");
  return d ? d : "assets";
}

inline std::string scenario_dir() {
  const char* d = std::getenv("ARW_SCENARIO_DIR");
  return d ? d : "scenarios";
}

inline arw::TriangleMesh random_triangle_soup(std::mt19937_64& rng, int n_faces,
                                              double half_extent = 2.0,
                                              double tri_size = 0.5) {
  std::vector<arw::Triangle> tris;
  while (static_cast<int>(tris.size()) < n_faces) {
    auto coord = [&] { return 2 * half_extent * rng01(rng) - half_extent; };
    auto jitter = [&] { return tri_size * (rng01(rng) - 0.5) * 2.0; };
    arw::Vec3 a{coord(), coord(), coord()};
    arw::Vec3 b = a + arw::Vec3{jitter(), jitter(), jitter()};
    arw::Vec3 c = a + arw::Vec3{jitter(), jitter(), jitter()};
    arw::Triangle t(a, b, c);
    if (!t.degenerate(1e-6)) tris.push_back(t);
  }
  return arw::TriangleMesh::from_triangles(tris);
}

// Exhaustive per-triangle nearest-hit reference for ray_cast.
inline std::optional<arw::Hit> brute_ray_cast(const arw::TriangleMesh& mesh,
                                              const arw::Ray& ray) {
  std::optional<arw::Hit> best;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    auto t = arw::ray_triangle(ray.origin, ray.direction, mesh.face(f));
    if (!t || *t <= arw::kRayEpsilon || *t > ray.max_range) continue;
    if (!best || *t < best->t || (*t == best->t && f < best->face))
      best = arw::Hit{*t, f, ray.origin + ray.direction * *t};
  }
  return best;
}

inline double brute_segment_distance(const arw::TriangleMesh& mesh, const arw::Vec3& a,
                                     const arw::Vec3& b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < mesh.face_count(); ++f)
    best = std::min(best, arw::segment_triangle_distance(a, b, mesh.face(f)));
  return best;
}

}  // namespace test
