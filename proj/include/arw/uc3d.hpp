#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "arw/bvh.hpp"
#include "arw/decimate.hpp"
#include "arw/errors.hpp"
#include "arw/inspection_path.hpp"
#include "arw/sensor_model.hpp"
#include "arw/tsp.hpp"
#include "arw/vehicle_model.hpp"

namespace arw {
namespace uc3d {

struct UniformityParams {
  double d_star = 0.5;                       // target viewing distance, m
  double eps_d = 0.1;                        // distance band half-width, m
  double eps_theta = 20.0 * kPi / 180.0;     // max deviation from the anti-normal
  std::size_t target_faces = 134;

  bool valid(const SensorModel& sensor) const {
    return d_star >= sensor.d_min && eps_d > 0 && eps_theta > 0 && eps_theta < kPi / 2;
  }
};

namespace detail {

inline double rng01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Uniformly samples the spherical-cap region above the face centroid
// (distance uniform over the band, direction uniform on the cap) with the yaw
// aimed at the centroid. Resamples on occlusion, up to 200 tries.
inline Configuration sample_uniform_viewpoint(const Bvh& structure, std::size_t face,
                                              const UniformityParams& params,
                                              const SensorModel& sensor,
                                              std::mt19937_64& rng) {
  const Triangle& tri = structure.mesh().face(face);
  Vec3 u, v;
  {
    Vec3 a = std::fabs(tri.normal.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    u = tri.normal.cross(a).normalized();
    v = tri.normal.cross(u);
  }
  for (int attempt = 0; attempt < 200; ++attempt) {
    double d = params.d_star - params.eps_d + 2.0 * params.eps_d * detail::rng01(rng);
    double c = std::cos(params.eps_theta) +
               (1.0 - std::cos(params.eps_theta)) * detail::rng01(rng);
    double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    double phi = 2.0 * kPi * detail::rng01(rng);
    Vec3 dir = tri.normal * c + u * (s * std::cos(phi)) + v * (s * std::sin(phi));
    Vec3 pos = tri.centroid + dir * d;
    Vec3 to_face = tri.centroid - pos;
    Configuration cand(pos, std::atan2(to_face.y, to_face.x));
    if (face_visible(sensor, cand, structure, face)) return cand;
  }
  throw NoUnoccludedSample(static_cast<int>(face));
}

struct Result {
  InspectionPath path;
  TriangleMesh subsampled;
  std::vector<std::pair<double, double>> audit;  // per tour stop: (distance, angle)
  int restarts_used = 0;
};

// Samples one uniform viewpoint per face and retries the whole set until the
// randomization yields a connectable tour.
inline Result plan_uniform_inspection(const TriangleMesh& mesh,
                                      const UniformityParams& params,
                                      const SensorModel& sensor,
                                      const VehicleModel& vehicle, int max_restarts,
                                      std::uint64_t seed) {
  TriangleMesh sub = params.target_faces < mesh.face_count()
                         ? subsample_mesh(mesh, params.target_faces)
                         : mesh;
  Bvh bvh(sub);
  std::size_t n = sub.face_count();
  std::vector<std::string> diagnostics;

  for (int restart = 0; restart < max_restarts; ++restart) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(restart));
    std::vector<Configuration> vps;
    bool sampled_all = true;
    for (std::size_t f = 0; f < n; ++f) {
      try {
        vps.push_back(sample_uniform_viewpoint(bvh, f, params, sensor, rng));
      } catch (const NoUnoccludedSample&) {
        diagnostics.push_back("restart " + std::to_string(restart) + ": face " +
                              std::to_string(f) + " fully occluded");
        sampled_all = false;
        break;
      }
    }
    if (!sampled_all) continue;

    // Leg feasibility: local connection plus collision against the structure.
    CostMatrix cm(n);
    std::size_t infeasible_pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        auto leg = connect(vehicle, vps[i], vps[j]);
        if (leg && !path_collides(bvh, *leg, vehicle.clearance)) {
          cm.at(i, j) = leg->cost;
        } else {
          cm.at(i, j) = kInf;
          ++infeasible_pairs;
        }
      }

    Tour tour;
    try {
      tour = solve_tour(cm, /*closed=*/n > 1, /*restarts=*/3, seed + 31 * restart);
    } catch (const Infeasible&) {
      diagnostics.push_back("restart " + std::to_string(restart) + ": no feasible tour (" +
                            std::to_string(infeasible_pairs) + " blocked legs)");
      continue;
    }
    if (!std::isfinite(tour.cost)) {
      diagnostics.push_back("restart " + std::to_string(restart) + ": tour uses blocked leg");
      continue;
    }

    Result result{InspectionPath{}, sub, {}, restart + 1};
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t i = tour.order[k];
      result.path.viewpoints.push_back(vps[i]);
      const Triangle& tri = sub.face(i);
      Vec3 view = tri.centroid - vps[i].position;
      double d = view.norm();
      double angle = std::acos(std::clamp((-view / d).dot(tri.normal), -1.0, 1.0));
      result.audit.emplace_back(d, angle);
    }
    if (n > 1) {
      for (std::size_t k = 0; k < n; ++k) {
        std::size_t i = tour.order[k], j = tour.order[(k + 1) % n];
        result.path.legs.push_back({vps[i], vps[j]});
      }
    }
    result.path.cost = tour.cost;
    result.path.covered_faces = coverage_union(sensor, bvh, result.path.viewpoints);
    return result;
  }

  std::string msg = "restarts exhausted";
  for (const auto& d : diagnostics) msg += "; " + d;
  throw NoFeasibleSolution(msg);
}

}  // namespace uc3d
}  // namespace arw
