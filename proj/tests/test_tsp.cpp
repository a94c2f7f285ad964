#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "arw/tsp.hpp"
#include "helpers.hpp"

using namespace arw;

namespace {

CostMatrix euclidean_matrix(const std::vector<std::pair<double, double>>& pts) {
  CostMatrix m(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      m.at(i, j) = std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
  return m;
}

}  // namespace

TEST_CASE("unit-square closed tour costs 4") {
  auto m = euclidean_matrix({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  Tour t = solve_tour(m, true, 3, 0);
  CHECK(t.cost == Catch::Approx(4.0));
  CHECK(brute_force_tour(m, true).cost == Catch::Approx(4.0));
}

TEST_CASE("five-city instance with a known optimum") {
  // Collinear-ish layout where nearest neighbor from 0 is suboptimal.
  auto m = euclidean_matrix({{0, 0}, {10, 0}, {10, 1}, {0, 1}, {5, 0.5}});
  Tour exact = brute_force_tour(m, true);
  Tour heur = solve_tour(m, true, 5, 1);
  CHECK(heur.cost == Catch::Approx(exact.cost));
}

TEST_CASE("heuristic matches brute force on random closed instances, n = 8") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 8; ++i)
      pts.emplace_back(10 * test::rng01(rng), 10 * test::rng01(rng));
    auto m = euclidean_matrix(pts);
    Tour exact = brute_force_tour(m, true);
    Tour heur = solve_tour(m, true, 8, 100 + trial);
    CHECK(heur.cost == Catch::Approx(exact.cost).epsilon(1e-9));
  }
}

TEST_CASE("heuristic matches brute force on random asymmetric instances") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    CostMatrix m(7);
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 7; ++j)
        if (i != j) m.at(i, j) = 1.0 + 9.0 * test::rng01(rng);
    Tour exact = brute_force_tour(m, true);
    Tour heur = solve_tour(m, true, 10, 500 + trial);
    CHECK(heur.cost <= exact.cost * 1.05 + 1e-12);
    CHECK(heur.cost >= exact.cost - 1e-12);  // never below the true optimum
  }
}

TEST_CASE("open tour with a fixed start keeps the start and matches brute force") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 7; ++i)
      pts.emplace_back(10 * test::rng01(rng), 10 * test::rng01(rng));
    auto m = euclidean_matrix(pts);
    Tour heur = solve_tour(m, false, 8, 900 + trial, 0);
    REQUIRE(heur.order.front() == 0);

    // Brute force over open tours starting at 0.
    std::vector<std::size_t> rest{1, 2, 3, 4, 5, 6};
    double best = kInf;
    do {
      std::vector<std::size_t> p{0};
      p.insert(p.end(), rest.begin(), rest.end());
      best = std::min(best, tour_cost(m, p, false));
    } while (std::next_permutation(rest.begin(), rest.end()));
    CHECK(heur.cost == Catch::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("infeasible and degenerate instances") {
  CostMatrix m(3);
  m.at(0, 1) = m.at(1, 0) = 1.0;
  m.at(0, 2) = m.at(2, 0) = kInf;
  m.at(1, 2) = m.at(2, 1) = kInf;
  CHECK_THROWS_AS(brute_force_tour(m, true), Infeasible);
  CHECK_THROWS_AS(solve_tour(m, true, 3, 0), Infeasible);

  CostMatrix one(1);
  CHECK(solve_tour(one, true, 3, 0).cost == 0.0);
  CHECK(brute_force_tour(one, true).order == std::vector<std::size_t>{0});

  CostMatrix big(11);
  CHECK_THROWS_AS(brute_force_tour(big, true), TooLarge);
}

TEST_CASE("tour orders are permutations and deterministic given the seed") {
  std::mt19937_64 rng(9);
  CostMatrix m(9);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j)
      if (i != j) m.at(i, j) = 1.0 + test::rng01(rng);
  Tour a = solve_tour(m, true, 5, 314);
  Tour b = solve_tour(m, true, 5, 314);
  CHECK(a.order == b.order);
  CHECK(a.cost == b.cost);
  std::vector<std::size_t> sorted = a.order;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(a.cost == Catch::Approx(tour_cost(m, a.order, true)));
}
