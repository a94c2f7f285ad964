#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "arw/bvh.hpp"
#include "arw/mesh_io.hpp"
#include "arw/shapes.hpp"
#include "helpers.hpp"

using namespace arw;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = std::string("/tmp/") + name;
  std::ofstream out(path);
  out << content;
  return path;
}

const char* kSingleTriangleStl = R"(solid tri
  facet normal 0 0 1
    outer loop
      vertex 0 0 0
      vertex 1 0 0
      vertex 0 1 0
    endloop
  endfacet
endsolid tri
)";

}  // namespace

TEST_CASE("load_mesh parses a single-triangle ASCII STL") {
  auto path = write_temp("tri.stl", kSingleTriangleStl);
  TriangleMesh mesh = load_mesh(path);
  REQUIRE(mesh.face_count() == 1);
  CHECK(mesh.face(0).normal.x == Catch::Approx(0.0).margin(1e-12));
  CHECK(mesh.face(0).normal.y == Catch::Approx(0.0).margin(1e-12));
  CHECK(mesh.face(0).normal.z == Catch::Approx(1.0));
}

TEST_CASE("load_mesh drops zero-area faces and reports them") {
  std::string stl = R"(solid m
  facet normal 0 0 1
    outer loop
      vertex 0 0 0
      vertex 1 0 0
      vertex 0 1 0
    endloop
  endfacet
  facet normal 0 0 1
    outer loop
      vertex 0 0 0
      vertex 1 0 0
      vertex 2 0 0
    endloop
  endfacet
  facet normal 0 0 1
    outer loop
      vertex 0 0 1
      vertex 1 0 1
      vertex 0 1 1
    endloop
  endfacet
endsolid m
)";
  auto path = write_temp("degen.stl", stl);
  LoadReport report;
  TriangleMesh mesh = load_mesh(path, &report);
  CHECK(mesh.face_count() == 2);
  CHECK(report.dropped_faces == 1);
}

TEST_CASE("load_mesh reads a unit-cube OBJ") {
  TriangleMesh cube = shapes::make_unit_cube();
  std::string path = "/tmp/cube_io.obj";
  save_obj(cube, path);
  TriangleMesh loaded = load_mesh(path);
  REQUIRE(loaded.face_count() == 12);
  CHECK(loaded.total_area() == Catch::Approx(6.0));
}

TEST_CASE("load -> save -> load round-trip preserves faces") {
  std::mt19937_64 rng(3);
  TriangleMesh mesh = test::random_triangle_soup(rng, 30);
  save_obj(mesh, "/tmp/rt.obj");
  TriangleMesh back = load_mesh("/tmp/rt.obj");
  REQUIRE(back.face_count() == mesh.face_count());
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    CHECK(dist(mesh.face(f).v0, back.face(f).v0) < 1e-6);
    CHECK(dist(mesh.face(f).v1, back.face(f).v1) < 1e-6);
    CHECK(dist(mesh.face(f).v2, back.face(f).v2) < 1e-6);
  }
}

TEST_CASE("stl binary round-trip via save_stl_ascii and binary parser") {
  TriangleMesh cube = shapes::make_unit_cube();
  save_stl_ascii(cube, "/tmp/cube.stl");
  TriangleMesh back = load_mesh("/tmp/cube.stl");
  CHECK(back.face_count() == 12);
}

TEST_CASE("load_mesh errors") {
  CHECK_THROWS_AS(load_mesh("/tmp/definitely_missing.obj"), FileNotFound);
  auto path = write_temp("empty.obj", "v 0 0 0\n");
  CHECK_THROWS_AS(load_mesh(path), EmptyMesh);
  auto bad = write_temp("bad.obj", "v 0 0 0\nf 1 2 9\n");
  CHECK_THROWS_AS(load_mesh(bad), ParseError);
}

TEST_CASE("ray_cast hits the triangle above the origin") {
  auto path = write_temp("tri2.stl", kSingleTriangleStl);
  TriangleMesh mesh = load_mesh(path);
  Bvh bvh(mesh);
  auto hit = bvh.ray_cast(Ray{{0.2, 0.2, -1.0}, {0, 0, 1}});
  REQUIRE(hit);
  CHECK(hit->t == Catch::Approx(1.0));
  CHECK(hit->face == 0);

  // Parallel offset ray misses.
  CHECK_FALSE(bvh.ray_cast(Ray{{0, 0, 0.5}, {1, 0, 0}}));
}

TEST_CASE("ray_cast matches the exhaustive per-triangle loop on random rays") {
  std::mt19937_64 rng(7);
  TriangleMesh mesh = test::random_triangle_soup(rng, 50);
  Bvh bvh(mesh);
  int hits = 0;
  for (int i = 0; i < 100; ++i) {
    Vec3 o{6 * test::rng01(rng) - 3, 6 * test::rng01(rng) - 3, 6 * test::rng01(rng) - 3};
    Vec3 d{test::rng01(rng) - 0.5, test::rng01(rng) - 0.5, test::rng01(rng) - 0.5};
    if (d.norm() < 1e-9) continue;
    Ray ray{o, d.normalized(), 10.0};
    auto a = bvh.ray_cast(ray);
    auto b = test::brute_ray_cast(mesh, ray);
    REQUIRE(a.has_value() == b.has_value());
    if (a) {
      CHECK(a->face == b->face);
      CHECK(a->t == b->t);
      ++hits;
    }
  }
  CHECK(hits > 0);
}

TEST_CASE("ray_cast tie-break picks the lowest face index") {
  // Two coincident triangles; the ray hits both at the same t.
  std::vector<Triangle> tris{Triangle({0, 0, 1}, {1, 0, 1}, {0, 1, 1}),
                             Triangle({0, 0, 1}, {1, 0, 1}, {0, 1, 1})};
  TriangleMesh mesh(tris);
  Bvh bvh(mesh);
  auto hit = bvh.ray_cast(Ray{{0.2, 0.2, 0}, {0, 0, 1}});
  REQUIRE(hit);
  CHECK(hit->face == 0);
}

TEST_CASE("segment_collides basic cases on the unit cube") {
  TriangleMesh cube = shapes::make_unit_cube();
  Bvh bvh(cube);
  // 0.5 m above the top face, clearance 0.2.
  CHECK_FALSE(bvh.segment_collides({-1, 0.5, 1.5}, {2, 0.5, 1.5}, 0.2));
  // Through the interior.
  CHECK(bvh.segment_collides({-1, 0.5, 0.5}, {2, 0.5, 0.5}, 0.0));
}

TEST_CASE("segment_collides matches brute-force distance on random segments") {
  std::mt19937_64 rng(11);
  TriangleMesh mesh = test::random_triangle_soup(rng, 40);
  Bvh bvh(mesh);
  const double clearance = 0.3;
  for (int i = 0; i < 200; ++i) {
    Vec3 a{6 * test::rng01(rng) - 3, 6 * test::rng01(rng) - 3, 6 * test::rng01(rng) - 3};
    Vec3 b{6 * test::rng01(rng) - 3, 6 * test::rng01(rng) - 3, 6 * test::rng01(rng) - 3};
    double exact = test::brute_segment_distance(mesh, a, b);
    bool hit = bvh.segment_collides(a, b, clearance);
    if (exact <= clearance) CHECK(hit);           // conservative: never misses
    if (exact > clearance + 1e-6) CHECK_FALSE(hit);
    CHECK(hit == bvh.segment_collides(b, a, clearance));  // symmetry
  }
}

TEST_CASE("segment_distance agrees with the brute-force oracle") {
  std::mt19937_64 rng(13);
  TriangleMesh mesh = test::random_triangle_soup(rng, 30);
  Bvh bvh(mesh);
  for (int i = 0; i < 100; ++i) {
    Vec3 a{6 * test::rng01(rng) - 3, 6 * test::rng01(rng) - 3, 6 * test::rng01(rng) - 3};
    Vec3 b{6 * test::rng01(rng) - 3, 6 * test::rng01(rng) - 3, 6 * test::rng01(rng) - 3};
    CHECK(bvh.segment_distance(a, b) ==
          Catch::Approx(test::brute_segment_distance(mesh, a, b)).margin(1e-12));
  }
}

TEST_CASE("shape generators have the documented face counts") {
  CHECK(shapes::make_unit_cube().face_count() == 12);
  CHECK(shapes::make_cylinder(1.0, 2.0, 50).face_count() == 200);
  CHECK(shapes::make_icosphere(1.0, 3).face_count() == 1280);
  TriangleMesh room = shapes::make_room({0, 0, 0}, {4, 4, 2});
  CHECK(room.face_count() == 12);
  // Inward normals: the face normal at each wall points into the box.
  for (std::size_t f = 0; f < room.face_count(); ++f) {
    Vec3 to_center = (Vec3{2, 2, 1} - room.face(f).centroid).normalized();
    CHECK(room.face(f).normal.dot(to_center) > 0.0);
  }
}
