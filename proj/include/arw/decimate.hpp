#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "arw/errors.hpp"
#include "arw/mesh.hpp"

namespace arw {

constexpr double kInfCount = 1e300;

namespace detail {

// One vertex-clustering pass at grid cell size h. Faces whose corners fall in
// fewer than 3 distinct cells are dropped; duplicate cluster triples collapse.
inline std::vector<Triangle> cluster_pass(const TriangleMesh& mesh, double h) {
  using Key = std::tuple<int, int, int>;
  const Vec3 lo = mesh.bounds().lo;
  auto key_of = [&](const Vec3& p) {
    return Key{static_cast<int>(std::floor((p.x - lo.x) / h)),
               static_cast<int>(std::floor((p.y - lo.y) / h)),
               static_cast<int>(std::floor((p.z - lo.z) / h))};
  };
  std::map<Key, std::pair<Vec3, int>> clusters;  // sum, count
  auto add = [&](const Vec3& p) {
    auto& c = clusters[key_of(p)];
    c.first += p;
    c.second += 1;
  };
  for (const auto& t : mesh.triangles()) { add(t.v0); add(t.v1); add(t.v2); }

  std::map<std::array<Key, 3>, bool> seen;
  std::vector<Triangle> out;
  for (const auto& t : mesh.triangles()) {
    std::array<Key, 3> k{key_of(t.v0), key_of(t.v1), key_of(t.v2)};
    if (k[0] == k[1] || k[1] == k[2] || k[0] == k[2]) continue;
    std::array<Key, 3> sorted = k;
    std::sort(sorted.begin(), sorted.end());
    if (seen[sorted]) continue;
    seen[sorted] = true;
    auto rep = [&](const Key& key) {
      const auto& c = clusters.at(key);
      return c.first / static_cast<double>(c.second);
    };
    Triangle tri(rep(k[0]), rep(k[1]), rep(k[2]));
    if (!tri.degenerate()) out.push_back(tri);
  }
  return out;
}

}  // namespace detail

// Vertex-clustering decimation; the grid cell size is bisected until the
// output face count lands in [0.8, 1.2] x target.
inline TriangleMesh subsample_mesh(const TriangleMesh& mesh, std::size_t target) {
  if (target < 4) throw TargetTooSmall();
  std::size_t f_in = mesh.face_count();
  if (target >= f_in) return mesh;

  double lo_band = 0.8 * static_cast<double>(target);
  double hi_band = 1.2 * static_cast<double>(target);
  Vec3 ext = mesh.bounds().extent();
  double h_lo = 1e-6;                              // keeps everything
  double h_hi = std::max({ext.x, ext.y, ext.z});   // collapses almost everything
  std::vector<Triangle> best;
  double best_err = kInfCount;
  for (int it = 0; it < 64; ++it) {
    double h = 0.5 * (h_lo + h_hi);
    auto tris = detail::cluster_pass(mesh, h);
    double count = static_cast<double>(tris.size());
    double err = std::fabs(count - static_cast<double>(target));
    if (!tris.empty() && err < best_err) {
      best_err = err;
      best = tris;
    }
    if (count >= lo_band && count <= hi_band) break;
    if (count > hi_band) h_lo = h;  // too fine, coarsen
    else h_hi = h;                  // too coarse, refine
  }
  if (best.size() < 4) throw Infeasible("decimation could not reach the target band");
  return TriangleMesh::from_triangles(best);
}

}  // namespace arw
