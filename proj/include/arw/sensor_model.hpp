#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "arw/bvh.hpp"
#include "arw/config.hpp"
#include "arw/mesh.hpp"
#include "arw/vec3.hpp"

namespace arw {

// Camera frustum with range and incidence constraints. Angles in radians.
struct SensorModel {
  double hfov = 90.0 * kPi / 180.0;
  double vfov = 60.0 * kPi / 180.0;
  double d_min = 0.35;
  double d_max = 5.0;
  double max_incidence = 72.0 * kPi / 180.0;
  double pitch = -15.0 * kPi / 180.0;  // mounting pitch, body frame

  bool valid() const {
    return hfov > 0 && hfov < kPi && vfov > 0 && vfov < kPi &&
           d_min >= 0 && d_min < d_max && max_incidence > 0 &&
           max_incidence <= kPi / 2;
  }
};

// World-frame direction of the optical axis at `config` (yaw + mounting pitch).
inline Vec3 optical_axis(const SensorModel& sensor, const Configuration& config) {
  double cp = std::cos(sensor.pitch), sp = std::sin(sensor.pitch);
  double cy = std::cos(config.yaw), sy = std::sin(config.yaw);
  return {cp * cy, cp * sy, sp};
}

// World point -> camera frame (x forward along optical axis, y left, z up).
inline Vec3 to_camera_frame(const SensorModel& sensor, const Configuration& config,
                            const Vec3& p) {
  Vec3 d = p - config.position;
  double cy = std::cos(config.yaw), sy = std::sin(config.yaw);
  Vec3 body{cy * d.x + sy * d.y, -sy * d.x + cy * d.y, d.z};
  double cp = std::cos(sensor.pitch), sp = std::sin(sensor.pitch);
  return {cp * body.x + sp * body.z, body.y, -sp * body.x + cp * body.z};
}

// Frustum membership: azimuth/elevation within the FOV and range within
// [d_min, d_max].
inline bool in_frustum(const SensorModel& sensor, const Configuration& config,
                       const Vec3& p) {
  Vec3 c = to_camera_frame(sensor, config, p);
  double range = c.norm();
  if (range < sensor.d_min || range > sensor.d_max) return false;
  if (c.x <= 0.0) return false;
  double az = std::atan2(c.y, c.x);
  double el = std::atan2(c.z, std::sqrt(c.x * c.x + c.y * c.y));
  return std::fabs(az) <= sensor.hfov / 2 && std::fabs(el) <= sensor.vfov / 2;
}

// Face visibility at centroid granularity: frustum + range + incidence +
// occlusion. Shared-edge tolerance 1e-6 on the occlusion distance.
inline bool face_visible(const SensorModel& sensor, const Configuration& config,
                         const Bvh& bvh, std::size_t face) {
  const Triangle& tri = bvh.mesh().face(face);
  if (!in_frustum(sensor, config, tri.centroid)) return false;
  Vec3 view = tri.centroid - config.position;
  double range = view.norm();
  if (range <= 0.0) return false;
  Vec3 dir = view / range;
  // Incidence: angle between the viewing ray and the reversed face normal.
  double cos_inc = (-dir).dot(tri.normal);
  if (cos_inc < std::cos(sensor.max_incidence)) return false;
  auto hit = bvh.ray_cast(Ray{config.position, dir, range + 1e-6});
  if (!hit) return false;  // numeric edge graze; treat as occluded
  return hit->face == face || hit->t >= range - 1e-6;
}

inline std::vector<std::size_t> visible_set(const SensorModel& sensor,
                                            const Configuration& config,
                                            const Bvh& bvh) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < bvh.mesh().face_count(); ++f)
    if (face_visible(sensor, config, bvh, f)) out.push_back(f);
  return out;
}

// One simulated ray: direction in world frame plus the nearest hit, if any,
// within d_max.
struct ScanRay {
  Vec3 direction;
  std::optional<Vec3> hit;
};

// Deterministic depth scan: uniform angular grid over the frustum, nearest
// mesh hit per ray within d_max. Grid must be at least 2x2.
inline std::vector<ScanRay> simulate_scan(const SensorModel& sensor,
                                          const Configuration& config,
                                          const Bvh& world, int rays_h, int rays_v) {
  std::vector<ScanRay> out;
  out.reserve(static_cast<std::size_t>(rays_h) * rays_v);
  double cy = std::cos(config.yaw), sy = std::sin(config.yaw);
  double cp = std::cos(sensor.pitch), sp = std::sin(sensor.pitch);
  for (int iv = 0; iv < rays_v; ++iv) {
    double el = -sensor.vfov / 2 + sensor.vfov * iv / (rays_v - 1);
    for (int ih = 0; ih < rays_h; ++ih) {
      double az = -sensor.hfov / 2 + sensor.hfov * ih / (rays_h - 1);
      Vec3 cam{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
      Vec3 body{cp * cam.x - sp * cam.z, cam.y, sp * cam.x + cp * cam.z};
      Vec3 dir{cy * body.x - sy * body.y, sy * body.x + cy * body.y, body.z};
      ScanRay ray{dir, std::nullopt};
      if (auto hit = world.ray_cast(Ray{config.position, dir, sensor.d_max}))
        ray.hit = hit->point;
      out.push_back(ray);
    }
  }
  return out;
}

}  // namespace arw
