#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "arw/mesh.hpp"
#include "arw/vec3.hpp"

namespace arw {

// Closest point on segment [a,b] to p.
inline Vec3 closest_point_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  Vec3 ab = b - a;
  double denom = ab.norm2();
  if (denom <= 0.0) return a;
  double t = std::clamp((p - a).dot(ab) / denom, 0.0, 1.0);
  return a + ab * t;
}

// Closest point on triangle to p (Ericson, Real-Time Collision Detection).
inline Vec3 closest_point_triangle(const Vec3& p, const Triangle& tri) {
  const Vec3 &a = tri.v0, &b = tri.v1, &c = tri.v2;
  Vec3 ab = b - a, ac = c - a, ap = p - a;
  double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  Vec3 bp = p - b;
  double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

  Vec3 cp = p - c;
  double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

  double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));

  double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

// Min distance between segments [p1,q1] and [p2,q2].
inline double segment_segment_distance(const Vec3& p1, const Vec3& q1,
                                       const Vec3& p2, const Vec3& q2) {
  Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
  double a = d1.norm2(), e = d2.norm2(), f = d2.dot(r);
  double s, t;
  const double eps = 1e-12;
  if (a <= eps && e <= eps) return r.norm();
  if (a <= eps) {
    s = 0.0;
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    double c = d1.dot(r);
    if (e <= eps) {
      t = 0.0;
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      double b = d1.dot(d2);
      double denom = a * e - b * b;
      s = denom > eps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  Vec3 c1 = p1 + d1 * s, c2 = p2 + d2 * t;
  return (c1 - c2).norm();
}

// Moller-Trumbore ray/triangle intersection; returns parameter t along `dir`
// (assumed unit) or nothing. Culling-free: hits both sides.
inline std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir,
                                          const Triangle& tri) {
  const double eps = 1e-12;
  Vec3 e1 = tri.v1 - tri.v0, e2 = tri.v2 - tri.v0;
  Vec3 pvec = dir.cross(e2);
  double det = e1.dot(pvec);
  if (std::fabs(det) < eps) return std::nullopt;
  double inv_det = 1.0 / det;
  Vec3 tvec = origin - tri.v0;
  double u = tvec.dot(pvec) * inv_det;
  if (u < -1e-12 || u > 1.0 + 1e-12) return std::nullopt;
  Vec3 qvec = tvec.cross(e1);
  double v = dir.dot(qvec) * inv_det;
  if (v < -1e-12 || u + v > 1.0 + 1e-12) return std::nullopt;
  return e2.dot(qvec) * inv_det;
}

inline bool segment_intersects_triangle(const Vec3& a, const Vec3& b, const Triangle& tri) {
  Vec3 d = b - a;
  double len = d.norm();
  if (len <= 0.0) return false;
  auto t = ray_triangle(a, d / len, tri);
  return t && *t >= -1e-12 && *t <= len + 1e-12;
}

// Exact min distance between segment [a,b] and a triangle.
inline double segment_triangle_distance(const Vec3& a, const Vec3& b, const Triangle& tri) {
  if (segment_intersects_triangle(a, b, tri)) return 0.0;
  double d = (closest_point_triangle(a, tri) - a).norm();
  d = std::min(d, (closest_point_triangle(b, tri) - b).norm());
  d = std::min(d, segment_segment_distance(a, b, tri.v0, tri.v1));
  d = std::min(d, segment_segment_distance(a, b, tri.v1, tri.v2));
  d = std::min(d, segment_segment_distance(a, b, tri.v2, tri.v0));
  return d;
}

// Squared distance from point to AABB (0 inside).
inline double point_aabb_dist2(const Vec3& p, const Aabb& box) {
  double d2 = 0.0;
  auto axis = [&](double v, double lo, double hi) {
    if (v < lo) { double d = lo - v; d2 += d * d; }
    else if (v > hi) { double d = v - hi; d2 += d * d; }
  };
  axis(p.x, box.lo.x, box.hi.x);
  axis(p.y, box.lo.y, box.hi.y);
  axis(p.z, box.lo.z, box.hi.z);
  return d2;
}

// Slab test: does segment [a,b] intersect the AABB?
inline bool segment_intersects_aabb(const Vec3& a, const Vec3& b, const Aabb& box) {
  double tmin = 0.0, tmax = 1.0;
  Vec3 d = b - a;
  const double* av = &a.x;
  const double* dv = &d.x;
  const double* lov = &box.lo.x;
  const double* hiv = &box.hi.x;
  for (int i = 0; i < 3; ++i) {
    if (std::fabs(dv[i]) < 1e-15) {
      if (av[i] < lov[i] || av[i] > hiv[i]) return false;
    } else {
      double inv = 1.0 / dv[i];
      double t1 = (lov[i] - av[i]) * inv;
      double t2 = (hiv[i] - av[i]) * inv;
      if (t1 > t2) std::swap(t1, t2);
      tmin = std::max(tmin, t1);
      tmax = std::min(tmax, t2);
      if (tmin > tmax) return false;
    }
  }
  return true;
}

}  // namespace arw
