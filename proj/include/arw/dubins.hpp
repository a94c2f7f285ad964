#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "arw/config.hpp"

namespace arw {

// Shortest Dubins path in the plane, minimum turn radius rho. Closed-form
// over the six words; lengths are exact, sampling walks the arcs.
namespace dubins {

enum class Word { LSL, LSR, RSL, RSR, RLR, LRL };

inline double mod2pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

struct Path {
  double qi[3] = {0, 0, 0};     // start x, y, heading
  double seg[3] = {0, 0, 0};    // normalized segment lengths
  double rho = 1.0;
  Word word = Word::LSL;

  double length() const { return (seg[0] + seg[1] + seg[2]) * rho; }

  // Pose at arc length s in [0, length()].
  std::array<double, 3> sample(double s) const {
    double t = s / rho;
    std::array<double, 3> q{0.0, 0.0, qi[2]};
    static const char kSegs[6][3] = {{'L', 'S', 'L'}, {'L', 'S', 'R'}, {'R', 'S', 'L'},
                                     {'R', 'S', 'R'}, {'R', 'L', 'R'}, {'L', 'R', 'L'}};
    const char* types = kSegs[static_cast<int>(word)];
    double x = 0.0, y = 0.0, th = qi[2];
    for (int i = 0; i < 3 && t > 1e-15; ++i) {
      double v = std::min(t, seg[i]);
      t -= v;
      if (types[i] == 'S') {
        x += v * std::cos(th);
        y += v * std::sin(th);
      } else {
        double turn = types[i] == 'L' ? 1.0 : -1.0;
        x += turn * (std::sin(th + turn * v) - std::sin(th));
        y += turn * (-std::cos(th + turn * v) + std::cos(th));
        th += turn * v;
      }
    }
    q[0] = qi[0] + x * rho;
    q[1] = qi[1] + y * rho;
    q[2] = wrap_angle(th);
    return q;
  }
};

namespace detail {

struct WordResult {
  double t, p, q;
};

inline std::optional<WordResult> lsl(double a, double b, double d, double sa, double sb,
                                     double ca, double cb, double cab) {
  double p2 = 2 + d * d - 2 * cab + 2 * d * (sa - sb);
  if (p2 < 0) return std::nullopt;
  double tmp = std::atan2(cb - ca, d + sa - sb);
  return WordResult{mod2pi(-a + tmp), std::sqrt(p2), mod2pi(b - tmp)};
}

inline std::optional<WordResult> rsr(double a, double b, double d, double sa, double sb,
                                     double ca, double cb, double cab) {
  double p2 = 2 + d * d - 2 * cab + 2 * d * (sb - sa);
  if (p2 < 0) return std::nullopt;
  double tmp = std::atan2(ca - cb, d - sa + sb);
  return WordResult{mod2pi(a - tmp), std::sqrt(p2), mod2pi(-b + tmp)};
}

inline std::optional<WordResult> lsr(double a, double b, double d, double sa, double sb,
                                     double ca, double cb, double cab) {
  double p2 = -2 + d * d + 2 * cab + 2 * d * (sa + sb);
  if (p2 < 0) return std::nullopt;
  double p = std::sqrt(p2);
  double tmp = std::atan2(-ca - cb, d + sa + sb) - std::atan2(-2.0, p);
  return WordResult{mod2pi(-a + tmp), p, mod2pi(-mod2pi(b) + tmp)};
}

inline std::optional<WordResult> rsl(double a, double b, double d, double sa, double sb,
                                     double ca, double cb, double cab) {
  double p2 = -2 + d * d + 2 * cab - 2 * d * (sa + sb);
  if (p2 < 0) return std::nullopt;
  double p = std::sqrt(p2);
  double tmp = std::atan2(ca + cb, d - sa - sb) - std::atan2(2.0, p);
  return WordResult{mod2pi(a - tmp), p, mod2pi(b - tmp)};
}

inline std::optional<WordResult> rlr(double a, double b, double d, double sa, double sb,
                                     double ca, double cb, double cab) {
  double tmp = (6.0 - d * d + 2 * cab + 2 * d * (sa - sb)) / 8.0;
  if (std::fabs(tmp) > 1.0) return std::nullopt;
  double p = mod2pi(2.0 * kPi - std::acos(tmp));
  double t = mod2pi(a - std::atan2(ca - cb, d - sa + sb) + mod2pi(p / 2.0));
  return WordResult{t, p, mod2pi(a - b - t + mod2pi(p))};
}

inline std::optional<WordResult> lrl(double a, double b, double d, double sa, double sb,
                                     double ca, double cb, double cab) {
  double tmp = (6.0 - d * d + 2 * cab + 2 * d * (sb - sa)) / 8.0;
  if (std::fabs(tmp) > 1.0) return std::nullopt;
  double p = mod2pi(2.0 * kPi - std::acos(tmp));
  double t = mod2pi(-a - std::atan2(ca - cb, d + sa - sb) + p / 2.0);
  return WordResult{t, p, mod2pi(mod2pi(b) - a - t + mod2pi(p))};
}

}  // namespace detail

// Shortest path from (x0,y0,th0) to (x1,y1,th1). Empty only if every word
// fails numerically.
inline std::optional<Path> shortest(double x0, double y0, double th0, double x1,
                                    double y1, double th1, double rho) {
  double dx = x1 - x0, dy = y1 - y0;
  double big_d = std::sqrt(dx * dx + dy * dy);
  double d = big_d / rho;
  double phi = big_d > 1e-12 ? std::atan2(dy, dx) : 0.0;
  double a = mod2pi(th0 - phi), b = mod2pi(th1 - phi);
  double sa = std::sin(a), sb = std::sin(b), ca = std::cos(a), cb = std::cos(b);
  double cab = std::cos(a - b);

  using Fn = std::optional<detail::WordResult> (*)(double, double, double, double,
                                                   double, double, double, double);
  static const Fn kFns[6] = {detail::lsl, detail::lsr, detail::rsl,
                             detail::rsr, detail::rlr, detail::lrl};
  static const Word kWords[6] = {Word::LSL, Word::LSR, Word::RSL,
                                 Word::RSR, Word::RLR, Word::LRL};

  std::optional<Path> best;
  double best_len = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 6; ++i) {
    auto r = kFns[i](a, b, d, sa, sb, ca, cb, cab);
    if (!r) continue;
    double len = r->t + r->p + r->q;
    if (len < best_len) {
      best_len = len;
      Path path;
      path.qi[0] = x0; path.qi[1] = y0; path.qi[2] = th0;
      path.seg[0] = r->t; path.seg[1] = r->p; path.seg[2] = r->q;
      path.rho = rho;
      path.word = kWords[i];
      best = path;
    }
  }
  return best;
}

}  // namespace dubins
}  // namespace arw
