#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "arw/shapes.hpp"
#include "arw/uc3d.hpp"
#include "helpers.hpp"

using namespace arw;

namespace {

SensorModel wide_sensor() {
  SensorModel s;
  s.pitch = 0.0;
  s.vfov = 100.0 * kPi / 180.0;
  return s;
}

// Kolmogorov-Smirnov statistic against a uniform CDF on [lo, hi].
double ks_uniform(std::vector<double> xs, double lo, double hi) {
  std::sort(xs.begin(), xs.end());
  double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double cdf = (xs[i] - lo) / (hi - lo);
    d = std::max(d, std::fabs(cdf - (i + 1) / n));
    d = std::max(d, std::fabs(cdf - i / n));
  }
  return d;
}

// 2 x 2 grid of quads in the x = 0 plane, normals +x.
TriangleMesh make_wall_grid() {
  std::vector<Triangle> tris;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double y = i, z = j;
      tris.push_back(Triangle({0, y, z}, {0, y + 1, z}, {0, y + 1, z + 1}));
      tris.push_back(Triangle({0, y, z}, {0, y + 1, z + 1}, {0, y, z + 1}));
    }
  return TriangleMesh(tris);
}

}  // namespace

TEST_CASE("subsample_mesh is the identity when the target is not below the input") {
  TriangleMesh cube = shapes::make_unit_cube();
  TriangleMesh same = subsample_mesh(cube, 12);
  CHECK(same.face_count() == 12);
  CHECK(subsample_mesh(cube, 200).face_count() == 12);
  CHECK_THROWS_AS(subsample_mesh(cube, 3), TargetTooSmall);
}

TEST_CASE("sphere decimation lands in the [0.8, 1.2] x 134 band and stays spherical") {
  TriangleMesh sphere = shapes::make_icosphere(1.0, 3);
  REQUIRE(sphere.face_count() == 1280);
  TriangleMesh sub = subsample_mesh(sphere, 134);
  CHECK(sub.face_count() >= 107);
  CHECK(sub.face_count() <= 161);
  for (const auto& t : sub.triangles())
    for (const Vec3& v : {t.v0, t.v1, t.v2}) {
      CHECK(v.norm() > 0.8);
      CHECK(v.norm() < 1.02);
    }
}

TEST_CASE("sampled viewpoints satisfy the distance band and cone constraints") {
  std::vector<Triangle> tris{Triangle({0, -0.3, -0.3}, {0, 0.3, -0.3}, {0, 0, 0.3})};
  TriangleMesh mesh(tris);
  Bvh bvh(mesh);
  REQUIRE(mesh.face(0).normal.x == Catch::Approx(1.0));
  uc3d::UniformityParams params;
  SensorModel sensor = wide_sensor();
  REQUIRE(params.valid(sensor));
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    Configuration vp = uc3d::sample_uniform_viewpoint(bvh, 0, params, sensor, rng);
    Vec3 off = vp.position - mesh.face(0).centroid;
    double d = off.norm();
    CHECK(d >= params.d_star - params.eps_d - 1e-12);
    CHECK(d <= params.d_star + params.eps_d + 1e-12);
    CHECK(off.normalized().dot(mesh.face(0).normal) >= std::cos(params.eps_theta) - 1e-12);
    CHECK(face_visible(sensor, vp, bvh, 0));
  }
}

TEST_CASE("distance and direction draws pass a KS uniformity test") {
  std::vector<Triangle> tris{Triangle({0, -0.3, -0.3}, {0, 0.3, -0.3}, {0, 0, 0.3})};
  TriangleMesh mesh(tris);
  Bvh bvh(mesh);
  uc3d::UniformityParams params;
  SensorModel sensor = wide_sensor();
  std::mt19937_64 rng(7);
  std::vector<double> dists, coss;
  for (int i = 0; i < 400; ++i) {
    Configuration vp = uc3d::sample_uniform_viewpoint(bvh, 0, params, sensor, rng);
    Vec3 off = vp.position - mesh.face(0).centroid;
    dists.push_back(off.norm());
    coss.push_back(off.normalized().dot(mesh.face(0).normal));
  }
  // Reject at p ~ 0.01: D >= 1.63 / sqrt(n).
  double thresh = 1.63 / std::sqrt(400.0);
  CHECK(ks_uniform(dists, params.d_star - params.eps_d, params.d_star + params.eps_d) < thresh);
  CHECK(ks_uniform(coss, std::cos(params.eps_theta), 1.0) < thresh);
}

TEST_CASE("a face with its viewing region walled off raises NoUnoccludedSample") {
  std::vector<Triangle> tris{Triangle({0, -0.3, -0.3}, {0, 0.3, -0.3}, {0, 0, 0.3}),
                             Triangle({0.2, -3, -3}, {0.2, 3, -3}, {0.2, 3, 3}),
                             Triangle({0.2, -3, -3}, {0.2, 3, 3}, {0.2, -3, 3})};
  TriangleMesh mesh(tris);
  Bvh bvh(mesh);
  uc3d::UniformityParams params;
  SensorModel sensor = wide_sensor();
  std::mt19937_64 rng(4);
  CHECK_THROWS_AS(uc3d::sample_uniform_viewpoint(bvh, 0, params, sensor, rng),
                  NoUnoccludedSample);
}

TEST_CASE("wall-grid inspection yields a tour satisfying the uniformity audit") {
  TriangleMesh wall = make_wall_grid();
  uc3d::UniformityParams params;
  params.target_faces = 8;
  SensorModel sensor = wide_sensor();
  VehicleModel vehicle;
  vehicle.clearance = 0.05;
  uc3d::Result r = uc3d::plan_uniform_inspection(wall, params, sensor, vehicle, 10, 5);
  CHECK(r.subsampled.face_count() == 8);
  REQUIRE(r.path.viewpoints.size() == 8);
  REQUIRE(r.audit.size() == 8);
  for (const auto& [d, angle] : r.audit) {
    CHECK(d >= params.d_star - params.eps_d - 1e-12);
    CHECK(d <= params.d_star + params.eps_d + 1e-12);
    CHECK(angle <= params.eps_theta + 1e-12);
  }
  CHECK(r.path.covered_faces.size() == 8);
  CHECK(std::isfinite(r.path.cost));
  CHECK(r.restarts_used >= 1);

  // Post-hoc recheck: every tour stop still sees its face after reordering.
  Bvh bvh(r.subsampled);
  std::size_t seen = 0;
  for (const auto& vp : r.path.viewpoints) seen += visible_set(sensor, vp, bvh).size();
  CHECK(seen >= 8);
}

TEST_CASE("uniform inspection planning is deterministic given the seed") {
  TriangleMesh wall = make_wall_grid();
  uc3d::UniformityParams params;
  params.target_faces = 8;
  SensorModel sensor = wide_sensor();
  VehicleModel vehicle;
  vehicle.clearance = 0.05;
  uc3d::Result a = uc3d::plan_uniform_inspection(wall, params, sensor, vehicle, 10, 5);
  uc3d::Result b = uc3d::plan_uniform_inspection(wall, params, sensor, vehicle, 10, 5);
  CHECK(a.path.cost == b.path.cost);
  REQUIRE(a.path.viewpoints.size() == b.path.viewpoints.size());
  for (std::size_t i = 0; i < a.path.viewpoints.size(); ++i) {
    CHECK(dist(a.path.viewpoints[i].position, b.path.viewpoints[i].position) == 0.0);
    CHECK(a.path.viewpoints[i].yaw == b.path.viewpoints[i].yaw);
  }
  CHECK(a.audit == b.audit);
}

TEST_CASE("params.valid rejects a target distance below the sensor minimum") {
  uc3d::UniformityParams params;
  SensorModel sensor = wide_sensor();
  params.d_star = 0.2;  // below d_min = 0.35
  CHECK_FALSE(params.valid(sensor));
}
