#include <catch2/catch_amalgamated.hpp>

#include "arw/sensor_model.hpp"
#include "arw/shapes.hpp"
#include "helpers.hpp"

using namespace arw;

namespace {

// Direct 4-condition reference evaluation of face visibility.
bool brute_face_visible(const SensorModel& sensor, const Configuration& config,
                        const TriangleMesh& mesh, std::size_t face) {
  const Triangle& tri = mesh.face(face);
  if (!in_frustum(sensor, config, tri.centroid)) return false;
  Vec3 view = tri.centroid - config.position;
  double range = view.norm();
  if (range <= 0.0) return false;
  Vec3 dir = view / range;
  if ((-dir).dot(tri.normal) < std::cos(sensor.max_incidence)) return false;
  auto hit = test::brute_ray_cast(mesh, Ray{config.position, dir, range + 1e-6});
  if (!hit) return false;
  return hit->face == face || hit->t >= range - 1e-6;
}

SensorModel level_sensor() {
  SensorModel s;
  s.pitch = 0.0;
  return s;
}

}  // namespace

TEST_CASE("face 1 m ahead facing the camera is visible") {
  SensorModel sensor = level_sensor();
  std::vector<Triangle> tris{
      Triangle({1, -0.2, -0.2}, {1, 0.2, -0.2}, {1, 0, 0.2})};  // normal -x... check below
  // Ensure the normal faces the camera at the origin (pointing -x).
  if (tris[0].normal.x > 0) tris[0] = Triangle({1, 0.2, -0.2}, {1, -0.2, -0.2}, {1, 0, 0.2});
  TriangleMesh mesh(tris);
  Bvh bvh(mesh);
  Configuration config({0, 0, 0}, 0.0);
  CHECK(face_visible(sensor, config, bvh, 0));
}

TEST_CASE("face closer than the minimum inspection distance is not visible") {
  SensorModel sensor = level_sensor();
  REQUIRE(sensor.d_min == Catch::Approx(0.35));
  std::vector<Triangle> tris{Triangle({0.2, 0.2, -0.2}, {0.2, -0.2, -0.2}, {0.2, 0, 0.2})};
  TriangleMesh mesh(tris);
  Bvh bvh(mesh);
  Configuration config({0, 0, 0}, 0.0);
  CHECK_FALSE(face_visible(sensor, config, bvh, 0));
}

TEST_CASE("face_visible matches the 4-condition brute evaluation on random pairs") {
  std::mt19937_64 rng(23);
  SensorModel sensor;  // default, pitched
  TriangleMesh mesh = test::random_triangle_soup(rng, 30);
  Bvh bvh(mesh);
  for (int i = 0; i < 300; ++i) {
    Configuration c(6 * test::rng01(rng) - 3, 6 * test::rng01(rng) - 3,
                    6 * test::rng01(rng) - 3, 2 * kPi * test::rng01(rng) - kPi);
    for (std::size_t f = 0; f < mesh.face_count(); ++f)
      REQUIRE(face_visible(sensor, c, bvh, f) == brute_face_visible(sensor, c, mesh, f));
  }
}

TEST_CASE("visible_set of a cube from the +x axis is the two +x faces") {
  TriangleMesh cube = shapes::make_unit_cube();
  Bvh bvh(cube);
  SensorModel sensor = level_sensor();
  Configuration config({3.0, 0.5, 0.5}, kPi);  // looking in -x
  auto vis = visible_set(sensor, config, bvh);
  REQUIRE(vis.size() == 2);
  for (std::size_t f : vis) {
    CHECK(cube.face(f).normal.x == Catch::Approx(1.0));
  }
}

TEST_CASE("all normals facing away yields an empty visible set") {
  TriangleMesh cube = shapes::make_unit_cube();
  Bvh bvh(cube);
  SensorModel sensor = level_sensor();
  Configuration config({3.0, 0.5, 0.5}, 0.0);  // looking away from the cube
  CHECK(visible_set(sensor, config, bvh).empty());
}

TEST_CASE("visible_set respects the range band") {
  TriangleMesh cube = shapes::make_unit_cube();
  Bvh bvh(cube);
  SensorModel sensor = level_sensor();
  Configuration config({3.0, 0.5, 0.5}, kPi);
  for (std::size_t f : visible_set(sensor, config, bvh)) {
    double d = dist(cube.face(f).centroid, config.position);
    CHECK(d >= sensor.d_min);
    CHECK(d <= sensor.d_max);
  }
}

TEST_CASE("rotating yaw by 2 pi leaves visible_set unchanged") {
  TriangleMesh cube = shapes::make_unit_cube();
  Bvh bvh(cube);
  SensorModel sensor;
  Configuration a({2.5, 0.5, 0.5}, 2.1);
  Configuration b(a.position, 2.1 + 2 * kPi);
  CHECK(visible_set(sensor, a, bvh) == visible_set(sensor, b, bvh));
}

TEST_CASE("adding a blocking triangle never enlarges visible_set") {
  TriangleMesh cube = shapes::make_unit_cube();
  Bvh bvh(cube);
  SensorModel sensor = level_sensor();
  Configuration config({3.0, 0.5, 0.5}, kPi);
  auto before = visible_set(sensor, config, bvh);

  std::vector<Triangle> tris = cube.triangles();
  tris.push_back(Triangle({2.0, 2.0, -2.0}, {2.0, -1.0, -2.0}, {2.0, 0.5, 3.0}));
  TriangleMesh blocked_mesh(tris);
  Bvh blocked(blocked_mesh);
  auto after = visible_set(sensor, config, blocked);
  for (std::size_t f : after) {
    if (f >= cube.face_count()) continue;
    CHECK(std::find(before.begin(), before.end(), f) != before.end());
  }
  CHECK(after.size() <= before.size() + 1);  // only the blocker itself may appear
}

TEST_CASE("simulate_scan in an empty world misses everywhere") {
  TriangleMesh empty;
  Bvh bvh(empty);
  SensorModel sensor;
  auto scan = simulate_scan(sensor, Configuration({0, 0, 0}, 0), bvh, 8, 4);
  REQUIRE(scan.size() == 32);
  for (const auto& r : scan) CHECK_FALSE(r.hit.has_value());
}

TEST_CASE("simulate_scan against a flat wall returns plane-geometry ranges") {
  // Wall at x = 2, large enough to fill the frustum.
  std::vector<Triangle> tris{Triangle({2, -20, -20}, {2, 20, -20}, {2, 0, 20})};
  TriangleMesh wall(tris);
  Bvh bvh(wall);
  SensorModel sensor = level_sensor();
  sensor.d_max = 50.0;
  Configuration config({0, 0, 0}, 0.0);
  auto scan = simulate_scan(sensor, config, bvh, 9, 5);
  for (const auto& r : scan) {
    REQUIRE(r.hit.has_value());
    // Range = 2 / cos(angle to the wall normal) = 2 / dir.x.
    double range = (*r.hit - config.position).norm();
    CHECK(range == Catch::Approx(2.0 / r.direction.normalized().x).epsilon(1e-9));
  }
}

TEST_CASE("simulate_scan matches per-ray ray_cast in the room") {
  TriangleMesh room = shapes::make_room({0, 0, 0}, {4, 4, 2});
  Bvh bvh(room);
  SensorModel sensor;
  Configuration config({2, 2, 1}, 0.7);
  auto scan = simulate_scan(sensor, config, bvh, 16, 8);
  for (const auto& r : scan) {
    auto hit = bvh.ray_cast(Ray{config.position, r.direction.normalized(), sensor.d_max});
    REQUIRE(r.hit.has_value() == hit.has_value());
    if (hit) CHECK(dist(*r.hit, hit->point) < 1e-12);
  }
}
