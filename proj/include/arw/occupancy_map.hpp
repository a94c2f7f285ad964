#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <unordered_map>
#include <vector>

#include "arw/config.hpp"
#include "arw/errors.hpp"
#include "arw/sensor_model.hpp"
#include "arw/vec3.hpp"

namespace arw {

enum class VoxelState { Unknown, Free, Occupied };

struct VoxelIndex {
  int x = 0, y = 0, z = 0;
  bool operator==(const VoxelIndex& o) const { return x == o.x && y == o.y && z == o.z; }
};

// Probabilistic voxel map over a fixed axis-aligned box. Storage is a hashed
// grid of dense 16^3 blocks. Log-odds clamped to [l_min, l_max]; a voxel with
// observation count 0 is Unknown regardless of log-odds.
class OccupancyMap {
 public:
  struct Params {
    double resolution = 0.2;
    Vec3 lo, hi;
    double l_hit = std::log(0.85 / 0.15);
    double l_miss = std::log(0.4 / 0.6);  // negative
    double l_min = -2.0;
    double l_max = 3.5;
    double occ_threshold = 0.0;  // log-odds of p=0.5
  };

  explicit OccupancyMap(const Params& p) : p_(p) {
    nx_ = dim(p_.hi.x - p_.lo.x);
    ny_ = dim(p_.hi.y - p_.lo.y);
    nz_ = dim(p_.hi.z - p_.lo.z);
  }

  OccupancyMap(double resolution, const Vec3& lo, const Vec3& hi)
      : OccupancyMap([&] { Params p; p.resolution = resolution; p.lo = lo; p.hi = hi; return p; }()) {}

  const Params& params() const { return p_; }
  double resolution() const { return p_.resolution; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  std::size_t voxel_count() const {
    return static_cast<std::size_t>(nx_) * ny_ * nz_;
  }

  bool in_bounds(const VoxelIndex& v) const {
    return v.x >= 0 && v.x < nx_ && v.y >= 0 && v.y < ny_ && v.z >= 0 && v.z < nz_;
  }
  bool in_bounds(const Vec3& p) const { return in_bounds(index_of(p)); }

  VoxelIndex index_of(const Vec3& p) const {
    return {static_cast<int>(std::floor((p.x - p_.lo.x) / p_.resolution)),
            static_cast<int>(std::floor((p.y - p_.lo.y) / p_.resolution)),
            static_cast<int>(std::floor((p.z - p_.lo.z) / p_.resolution))};
  }

  Vec3 center_of(const VoxelIndex& v) const {
    return {p_.lo.x + (v.x + 0.5) * p_.resolution,
            p_.lo.y + (v.y + 0.5) * p_.resolution,
            p_.lo.z + (v.z + 0.5) * p_.resolution};
  }

  VoxelState state(const VoxelIndex& v) const {
    if (!in_bounds(v)) return VoxelState::Unknown;
    const Cell* c = find(v);
    if (!c || c->count == 0) return VoxelState::Unknown;
    return c->log_odds > p_.occ_threshold ? VoxelState::Occupied : VoxelState::Free;
  }

  VoxelState state_at(const Vec3& p) const { return state(index_of(p)); }

  std::uint32_t observation_count(const VoxelIndex& v) const {
    const Cell* c = in_bounds(v) ? find(v) : nullptr;
    return c ? c->count : 0;
  }

  double log_odds(const VoxelIndex& v) const {
    const Cell* c = in_bounds(v) ? find(v) : nullptr;
    return c ? c->log_odds : 0.0;
  }

  std::size_t observed_count() const { return observed_; }
  double known_fraction() const {
    return static_cast<double>(observed_) / static_cast<double>(voxel_count());
  }

  // Integrates one scan. Rays traverse free space up to the hit (or to
  // max_range on a miss); the hit voxel gets the occupied update. Returns the
  // number of voxels observed for the first time.
  std::size_t integrate_scan(const Vec3& origin, const std::vector<ScanRay>& rays,
                             double max_range) {
    if (!in_bounds(origin)) throw OriginOutOfBounds();
    std::size_t newly = 0;
    for (const auto& ray : rays) {
      Vec3 dir = ray.direction.normalized();
      double hit_range = max_range;
      bool has_hit = false;
      if (ray.hit) {
        double d = (*ray.hit - origin).norm();
        if (d <= max_range) { hit_range = d; has_hit = true; }
      }
      Vec3 end = origin + dir * hit_range;
      VoxelIndex end_v = index_of(end);
      walk(origin, end, [&](const VoxelIndex& v) {
        if (!in_bounds(v)) return false;  // left the map
        if (has_hit && v == end_v) {
          newly += update(v, p_.l_hit);
          return false;
        }
        newly += update(v, p_.l_miss);
        return true;
      });
    }
    return newly;
  }

  // Number of Unknown voxels whose centers lie in the frustum at `config` and
  // are not shadowed by an Occupied voxel along the line of sight. Unknown
  // voxels are transparent for the sight check.
  std::size_t count_unknown_visible(const Configuration& config,
                                    const SensorModel& sensor) const {
    std::size_t n = 0;
    for_each_frustum_voxel(config, sensor, [&](const VoxelIndex& v) {
      if (state(v) == VoxelState::Unknown && line_of_sight(config.position, v)) ++n;
    });
    return n;
  }

  // Sum over visible, already-observed voxels of (1 - count/C_sat).
  double reobservation_gain(const Configuration& config, const SensorModel& sensor,
                            double c_sat = 10.0) const {
    double g = 0.0;
    for_each_frustum_voxel(config, sensor, [&](const VoxelIndex& v) {
      const Cell* c = find(v);
      if (!c || c->count == 0) return;
      if (!line_of_sight(config.position, v)) return;
      double w = 1.0 - static_cast<double>(c->count) / c_sat;
      if (w > 0.0) g += w;
    });
    return g;
  }

  // True if no Occupied voxel blocks the segment from `from` to the center of
  // voxel `target` (the target itself never blocks).
  bool line_of_sight(const Vec3& from, const VoxelIndex& target) const {
    bool clear = true;
    Vec3 end = center_of(target);
    walk(from, end, [&](const VoxelIndex& v) {
      if (v == target) return false;
      if (state(v) == VoxelState::Occupied) { clear = false; return false; }
      return true;
    });
    return clear;
  }

  // Visits every in-bounds voxel whose center lies inside the sensor frustum.
  template <typename Fn>
  void for_each_frustum_voxel(const Configuration& config, const SensorModel& sensor,
                              Fn&& fn) const {
    Vec3 lo = config.position - Vec3{sensor.d_max, sensor.d_max, sensor.d_max};
    Vec3 hi = config.position + Vec3{sensor.d_max, sensor.d_max, sensor.d_max};
    VoxelIndex a = index_of(lo), b = index_of(hi);
    a.x = std::max(a.x, 0); a.y = std::max(a.y, 0); a.z = std::max(a.z, 0);
    b.x = std::min(b.x, nx_ - 1); b.y = std::min(b.y, ny_ - 1); b.z = std::min(b.z, nz_ - 1);
    for (int z = a.z; z <= b.z; ++z)
      for (int y = a.y; y <= b.y; ++y)
        for (int x = a.x; x <= b.x; ++x) {
          VoxelIndex v{x, y, z};
          if (in_frustum(sensor, config, center_of(v))) fn(v);
        }
  }

  // Amanatides-Woo voxel walk from `from` to `to` (inclusive of the end
  // voxel). `fn` returns false to stop.
  template <typename Fn>
  void walk(const Vec3& from, const Vec3& to, Fn&& fn) const {
    double res = p_.resolution;
    Vec3 d = to - from;
    double len = d.norm();
    VoxelIndex v = index_of(from);
    VoxelIndex end = index_of(to);
    if (len <= 0.0 || (v == end)) { fn(v); return; }
    Vec3 dir = d / len;

    int step[3];
    double t_max[3], t_delta[3];
    const double* dv = &dir.x;
    const double* fv = &from.x;
    const double* lov = &p_.lo.x;
    const int* vi = &v.x;
    for (int i = 0; i < 3; ++i) {
      if (dv[i] > 1e-15) {
        step[i] = 1;
        t_delta[i] = res / dv[i];
        t_max[i] = ((vi[i] + 1) * res + lov[i] - fv[i]) / dv[i];
      } else if (dv[i] < -1e-15) {
        step[i] = -1;
        t_delta[i] = -res / dv[i];
        t_max[i] = (vi[i] * res + lov[i] - fv[i]) / dv[i];
      } else {
        step[i] = 0;
        t_delta[i] = std::numeric_limits<double>::infinity();
        t_max[i] = std::numeric_limits<double>::infinity();
      }
    }
    int* vm = &v.x;
    while (true) {
      if (!fn(v)) return;
      if (v == end) return;
      int axis = 0;
      if (t_max[1] < t_max[axis]) axis = 1;
      if (t_max[2] < t_max[axis]) axis = 2;
      if (t_max[axis] > len + res) return;  // numeric guard: end voxel missed
      vm[axis] += step[axis];
      t_max[axis] += t_delta[axis];
    }
  }

  // Occupied voxel centers as ASCII PLY with a height colormap.
  void export_occupied_ply(const std::string& path) const {
    std::vector<VoxelIndex> occ;
    for_each_cell([&](const VoxelIndex& v, const Cell& c) {
      if (c.count > 0 && c.log_odds > p_.occ_threshold) occ.push_back(v);
    });
    std::sort(occ.begin(), occ.end(), [&](const VoxelIndex& a, const VoxelIndex& b) {
      return linear_index(a) < linear_index(b);
    });
    std::ofstream out(path);
    if (!out) throw FileNotFound(path);
    out << "ply\nformat ascii 1.0\nelement vertex " << occ.size()
        << "\nproperty float x\nproperty float y\nproperty float z\n"
        << "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
    double zlo = p_.lo.z, zhi = p_.hi.z;
    out.precision(6);
    out << std::fixed;
    for (const auto& v : occ) {
      Vec3 c = center_of(v);
      double u = zhi > zlo ? (c.z - zlo) / (zhi - zlo) : 0.0;
      int r = static_cast<int>(255 * u);
      int b = static_cast<int>(255 * (1.0 - u));
      int g = static_cast<int>(255 * (1.0 - std::fabs(2 * u - 1)));
      out << c.x << " " << c.y << " " << c.z << " " << r << " " << g << " " << b << "\n";
    }
  }

  // Binary dump of (linear voxel index, log-odds, count) triples.
  void dump_binary(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileNotFound(path);
    struct Row { std::uint64_t idx; float lo; std::uint32_t cnt; };
    std::vector<Row> rows;
    for_each_cell([&](const VoxelIndex& v, const Cell& c) {
      rows.push_back({linear_index(v), static_cast<float>(c.log_odds), c.count});
    });
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.idx < b.idx; });
    for (const auto& r : rows) {
      out.write(reinterpret_cast<const char*>(&r.idx), sizeof r.idx);
      out.write(reinterpret_cast<const char*>(&r.lo), sizeof r.lo);
      out.write(reinterpret_cast<const char*>(&r.cnt), sizeof r.cnt);
    }
  }

  std::uint64_t linear_index(const VoxelIndex& v) const {
    return static_cast<std::uint64_t>(v.z) * nx_ * ny_ +
           static_cast<std::uint64_t>(v.y) * nx_ + v.x;
  }

 private:
  struct Cell {
    double log_odds = 0.0;
    std::uint32_t count = 0;
  };

  static constexpr int kBlockBits = 4;  // 16^3 blocks
  static constexpr int kBlockSize = 1 << kBlockBits;
  using Block = std::array<Cell, kBlockSize * kBlockSize * kBlockSize>;

  int dim(double extent) const {
    int n = static_cast<int>(std::ceil(extent / p_.resolution - 1e-9));
    return std::max(n, 1);
  }

  static std::uint64_t block_key(int bx, int by, int bz) {
    auto enc = [](int v) { return static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) & 0x1FFFFF; };
    return enc(bx) | (enc(by) << 21) | (enc(bz) << 42);
  }

  const Cell* find(const VoxelIndex& v) const {
    auto it = blocks_.find(block_key(v.x >> kBlockBits, v.y >> kBlockBits, v.z >> kBlockBits));
    if (it == blocks_.end()) return nullptr;
    return &it->second[cell_offset(v)];
  }

  static std::size_t cell_offset(const VoxelIndex& v) {
    int lx = v.x & (kBlockSize - 1);
    int ly = v.y & (kBlockSize - 1);
    int lz = v.z & (kBlockSize - 1);
    return (static_cast<std::size_t>(lz) * kBlockSize + ly) * kBlockSize + lx;
  }

  // Returns 1 if the voxel was observed for the first time.
  std::size_t update(const VoxelIndex& v, double delta) {
    Block& blk = blocks_[block_key(v.x >> kBlockBits, v.y >> kBlockBits, v.z >> kBlockBits)];
    Cell& c = blk[cell_offset(v)];
    std::size_t newly = c.count == 0 ? 1 : 0;
    observed_ += newly;
    c.log_odds = std::clamp(c.log_odds + delta, p_.l_min, p_.l_max);
    ++c.count;
    return newly;
  }

  template <typename Fn>
  void for_each_cell(Fn&& fn) const {
    for (const auto& [key, blk] : blocks_) {
      int bx = static_cast<int>(key & 0x1FFFFF);
      int by = static_cast<int>((key >> 21) & 0x1FFFFF);
      int bz = static_cast<int>((key >> 42) & 0x1FFFFF);
      for (int lz = 0; lz < kBlockSize; ++lz)
        for (int ly = 0; ly < kBlockSize; ++ly)
          for (int lx = 0; lx < kBlockSize; ++lx) {
            VoxelIndex v{(bx << kBlockBits) + lx, (by << kBlockBits) + ly,
                         (bz << kBlockBits) + lz};
            const Cell& c = blk[cell_offset(v)];
            if (c.count > 0) fn(v, c);
          }
    }
  }

  Params p_;
  int nx_ = 0, ny_ = 0, nz_ = 0;
  std::size_t observed_ = 0;
  std::unordered_map<std::uint64_t, Block> blocks_;
};

}  // namespace arw
