#include <cstdlib>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "arw/mission.hpp"
#include "arw/shapes.hpp"

namespace {

double rng01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

arw::TriangleMesh random_mesh(std::mt19937_64& rng, int n_faces) {
  std::vector<arw::Triangle> tris;
  while (static_cast<int>(tris.size()) < n_faces) {
    arw::Vec3 a{4 * rng01(rng) - 2, 4 * rng01(rng) - 2, 4 * rng01(rng) - 2};
    arw::Vec3 b = a + arw::Vec3{rng01(rng) - 0.5, rng01(rng) - 0.5, rng01(rng) - 0.5};
    arw::Vec3 c = a + arw::Vec3{rng01(rng) - 0.5, rng01(rng) - 0.5, rng01(rng) - 0.5};
    arw::Triangle t(a, b, c);
    if (!t.degenerate(1e-6)) tris.push_back(t);
  }
  return arw::TriangleMesh::from_triangles(tris);
}

// Exhaustive per-triangle nearest-hit loop, the reference for ray_cast.
std::optional<arw::Hit> brute_ray_cast(const arw::TriangleMesh& mesh, const arw::Ray& ray) {
  std::optional<arw::Hit> best;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    auto t = arw::ray_triangle(ray.origin, ray.direction, mesh.face(f));
    if (!t || *t <= arw::kRayEpsilon || *t > ray.max_range) continue;
    if (!best || *t < best->t || (*t == best->t && f < best->face))
      best = arw::Hit{*t, f, ray.origin + ray.direction * *t};
  }
  return best;
}

int check_raycast() {
  std::mt19937_64 rng(7);
  auto mesh = random_mesh(rng, 50);
  arw::Bvh bvh(mesh);
  for (int i = 0; i < 2000; ++i) {
    arw::Vec3 o{6 * rng01(rng) - 3, 6 * rng01(rng) - 3, 6 * rng01(rng) - 3};
    arw::Vec3 d{rng01(rng) - 0.5, rng01(rng) - 0.5, rng01(rng) - 0.5};
    if (d.norm() < 1e-9) continue;
    arw::Ray ray{o, d.normalized(), 10.0};
    auto a = bvh.ray_cast(ray);
    auto b = brute_ray_cast(mesh, ray);
    bool same = (!a && !b) || (a && b && a->face == b->face && a->t == b->t);
    if (!same) {
      std::cout << "FAIL raycast: mismatch at query " << i << "\n";
      return 1;
    }
  }
  std::cout << "PASS raycast: 2000 queries match the exhaustive loop\n";
  return 0;
}

int check_collision() {
  std::mt19937_64 rng(11);
  auto mesh = random_mesh(rng, 40);
  arw::Bvh bvh(mesh);
  for (int i = 0; i < 2000; ++i) {
    arw::Vec3 a{6 * rng01(rng) - 3, 6 * rng01(rng) - 3, 6 * rng01(rng) - 3};
    arw::Vec3 b{6 * rng01(rng) - 3, 6 * rng01(rng) - 3, 6 * rng01(rng) - 3};
    double exact = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < mesh.face_count(); ++f)
      exact = std::min(exact, arw::segment_triangle_distance(a, b, mesh.face(f)));
    bool hit = bvh.segment_collides(a, b, 0.3);
    bool expect = exact <= 0.3 + 1e-6;
    bool strict = exact <= 0.3;
    // Conservative band: never miss a true collision, over-report only within 1e-6.
    if (strict && !hit) {
      std::cout << "FAIL collision: missed true collision at query " << i << "\n";
      return 1;
    }
    if (hit && !expect) {
      std::cout << "FAIL collision: false positive beyond tolerance at query " << i << "\n";
      return 1;
    }
  }
  std::cout << "PASS collision: 2000 queries within the conservative band\n";
  return 0;
}

int check_tsp() {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed * 101 + 13);
    arw::CostMatrix m(8);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = i + 1; j < 8; ++j) {
        double c = 1.0 + 9.0 * rng01(rng);
        m.at(i, j) = c;
        m.at(j, i) = c;
      }
    auto exact = arw::brute_force_tour(m, true);
    auto heur = arw::solve_tour(m, true, 5, seed);
    if (std::fabs(exact.cost - heur.cost) > 1e-9) {
      std::cout << "FAIL tsp: seed " << seed << " heuristic " << heur.cost << " vs exact "
                << exact.cost << "\n";
      return 1;
    }
  }
  std::cout << "PASS tsp: matches brute force on 10 seeds, n=8\n";
  return 0;
}

int check_visibility() {
  std::mt19937_64 rng(23);
  auto mesh = arw::shapes::make_unit_cube();
  arw::Bvh bvh(mesh);
  arw::SensorModel sensor;
  for (int i = 0; i < 2000; ++i) {
    arw::Configuration c(6 * rng01(rng) - 3, 6 * rng01(rng) - 3, 6 * rng01(rng) - 3,
                         2 * arw::kPi * rng01(rng) - arw::kPi);
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
      // Direct 4-condition evaluation.
      const arw::Triangle& tri = mesh.face(f);
      bool expect = false;
      if (arw::in_frustum(sensor, c, tri.centroid)) {
        arw::Vec3 view = tri.centroid - c.position;
        double range = view.norm();
        arw::Vec3 dir = view / range;
        if ((-dir).dot(tri.normal) >= std::cos(sensor.max_incidence)) {
          auto hit = brute_ray_cast(mesh, arw::Ray{c.position, dir, range + 1e-6});
          expect = hit && (hit->face == f || hit->t >= range - 1e-6);
        }
      }
      if (arw::face_visible(sensor, c, bvh, f) != expect) {
        std::cout << "FAIL visibility: mismatch at query " << i << " face " << f << "\n";
        return 1;
      }
    }
  }
  std::cout << "PASS visibility: 2000 configs x 12 faces match direct evaluation\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inspection and exploration planning toolkit"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir;
  std::uint64_t seed_override = 0;
  bool has_seed = false, quiet = false;

  auto* plan = app.add_subcommand("plan", "Run a scenario file");
  plan->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  plan->add_option("--out", out_dir, "Output directory");
  plan->add_option("--seed", seed_override, "Override the scenario seed")
      ->each([&](const std::string&) { has_seed = true; });
  plan->add_flag("--quiet", quiet, "Suppress the summary line");

  std::string check;
  auto* oracle = app.add_subcommand("oracle", "Run a brute-force oracle check");
  oracle->add_option("check", check, "One of: raycast, collision, tsp, visibility, all")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (oracle->parsed()) {
    if (check == "raycast") return check_raycast();
    if (check == "collision") return check_collision();
    if (check == "tsp") return check_tsp();
    if (check == "visibility") return check_visibility();
    if (check == "all")
      return check_raycast() | check_collision() | check_tsp() | check_visibility();
    std::cerr << "unknown oracle check: " << check << "\n";
    return 2;
  }

  try {
    arw::Scenario sc = arw::load_scenario(scenario_path);
    if (has_seed) sc.seed = seed_override;
    std::string dir = !out_dir.empty() ? out_dir
                      : !sc.out_dir.empty() ? sc.out_dir
                      : std::getenv("ARW_OUT_DIR") ? std::getenv("ARW_OUT_DIR")
                                                   : "out";
    arw::MissionReport report = arw::run_mission(sc, dir);
    if (!report.success) {
      arw::json err = {{"error", {{"code", report.error_code},
                                  {"message", report.error_message}}}};
      std::cout << err.dump() << "\n";
      return 1;
    }
    if (!quiet) {
      std::cout << "mode=" << arw::to_string(report.mode)
                << " cost_s=" << report.total_cost_s << " fraction=" << report.fraction
                << " planning_time_s=" << report.planning_time_s << " out=" << dir << "\n";
    }
    return 0;
  } catch (const arw::Error& e) {
    arw::json err = {{"error", {{"code", e.code()}, {"message", e.what()}}}};
    std::cout << err.dump() << "\n";
    return 1;
  }
}
