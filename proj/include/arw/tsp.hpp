#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "arw/errors.hpp"

namespace arw {

constexpr double kInf = std::numeric_limits<double>::infinity();

// n x n cost matrix, possibly asymmetric, zero diagonal, +inf for infeasible
// pairs. Costs in seconds.
class CostMatrix {
 public:
  explicit CostMatrix(std::size_t n) : n_(n), c_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& at(std::size_t i, std::size_t j) { return c_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return c_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> c_;
};

struct Tour {
  std::vector<std::size_t> order;
  double cost = 0.0;
};

inline double tour_cost(const CostMatrix& m, const std::vector<std::size_t>& order,
                        bool closed) {
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) c += m.at(order[i], order[i + 1]);
  if (closed && order.size() > 1) c += m.at(order.back(), order.front());
  return c;
}

// Exact optimum by permutation enumeration, n <= 10. Ties broken
// lexicographically (first permutation in lexicographic order wins).
inline Tour brute_force_tour(const CostMatrix& m, bool closed) {
  std::size_t n = m.size();
  if (n > 10) throw TooLarge("brute_force_tour limited to n <= 10");
  if (n == 0) throw Infeasible("empty matrix");
  if (n == 1) return {{0}, 0.0};

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  // Closed tours are rotation-invariant: fix city 0 first.
  std::vector<std::size_t> best;
  double best_cost = kInf;
  auto consider = [&](const std::vector<std::size_t>& p) {
    double c = tour_cost(m, p, closed);
    if (c < best_cost) { best_cost = c; best = p; }
  };
  if (closed) {
    std::vector<std::size_t> rest(perm.begin() + 1, perm.end());
    do {
      std::vector<std::size_t> p{0};
      p.insert(p.end(), rest.begin(), rest.end());
      consider(p);
    } while (std::next_permutation(rest.begin(), rest.end()));
  } else {
    do consider(perm);
    while (std::next_permutation(perm.begin(), perm.end()));
  }
  if (best_cost == kInf) throw Infeasible("no finite tour");
  return {best, best_cost};
}

namespace detail {

inline std::vector<std::size_t> nearest_neighbor(const CostMatrix& m, std::size_t start) {
  std::size_t n = m.size();
  std::vector<bool> used(n, false);
  std::vector<std::size_t> order{start};
  used[start] = true;
  while (order.size() < n) {
    std::size_t cur = order.back();
    std::size_t best = n;
    double best_c = kInf;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      if (m.at(cur, j) < best_c) { best_c = m.at(cur, j); best = j; }
    }
    if (best == n) {  // all remaining unreachable; append cheapest-index anyway
      for (std::size_t j = 0; j < n; ++j)
        if (!used[j]) { best = j; break; }
    }
    used[best] = true;
    order.push_back(best);
  }
  return order;
}

// 2-opt with full directional recompute (asymmetric-safe), first improvement.
inline bool two_opt_pass(const CostMatrix& m, std::vector<std::size_t>& order,
                         bool closed, double& cost, bool pin_first) {
  std::size_t n = order.size();
  bool improved = false;
  for (std::size_t i = pin_first ? 1 : 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::reverse(order.begin() + i, order.begin() + j + 1);
      double c = tour_cost(m, order, closed);
      if (c < cost - 1e-12) {
        cost = c;
        improved = true;
      } else {
        std::reverse(order.begin() + i, order.begin() + j + 1);
      }
    }
  }
  return improved;
}

// Or-opt: relocate segments of length 1..3, first improvement.
inline bool or_opt_pass(const CostMatrix& m, std::vector<std::size_t>& order,
                        bool closed, double& cost, bool pin_first) {
  std::size_t n = order.size();
  bool improved = false;
  std::size_t first = pin_first ? 1 : 0;
  for (std::size_t len = 1; len <= 3 && len < n; ++len) {
    for (std::size_t i = first; i + len <= n; ++i) {
      std::vector<std::size_t> seg(order.begin() + i, order.begin() + i + len);
      std::vector<std::size_t> rest = order;
      rest.erase(rest.begin() + i, rest.begin() + i + len);
      for (std::size_t k = first; k <= rest.size(); ++k) {
        if (k == i) continue;
        std::vector<std::size_t> cand = rest;
        cand.insert(cand.begin() + k, seg.begin(), seg.end());
        double c = tour_cost(m, cand, closed);
        if (c < cost - 1e-12) {
          order = cand;
          cost = c;
          improved = true;
          break;
        }
      }
    }
  }
  return improved;
}

}  // namespace detail

// Nearest-neighbor construction plus 2-opt and Or-opt improvement to a local
// optimum, best over `restarts` seeded starts. Deterministic given seed.
// Open tours: pass closed=false (routing uses a virtual depot internally via
// `fixed_start` when a specific first city is required).
inline Tour solve_tour(const CostMatrix& m, bool closed, int restarts,
                       std::uint64_t seed,
                       std::optional<std::size_t> fixed_start = std::nullopt) {
  std::size_t n = m.size();
  if (n == 0) throw Infeasible("empty matrix");
  if (n == 1) return {{0}, 0.0};

  std::mt19937_64 rng(seed);
  Tour best;
  best.cost = kInf;
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    std::size_t start;
    if (fixed_start) start = *fixed_start;
    else if (r == 0) start = 0;
    else start = static_cast<std::size_t>(rng() % n);
    std::vector<std::size_t> order = detail::nearest_neighbor(m, start);
    double cost = tour_cost(m, order, closed);
    bool pin = fixed_start.has_value() && !closed;
    bool improved = true;
    while (improved) {
      improved = detail::two_opt_pass(m, order, closed, cost, pin);
      improved = detail::or_opt_pass(m, order, closed, cost, pin) || improved;
    }
    if (cost < best.cost) best = {order, cost};
  }
  if (best.cost == kInf) throw Infeasible("no finite tour");
  return best;
}

}  // namespace arw
