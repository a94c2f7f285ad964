#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "arw/bvh.hpp"
#include "arw/ekf.hpp"
#include "arw/errors.hpp"
#include "arw/nbv.hpp"
#include "arw/occupancy_map.hpp"
#include "arw/rrt_star.hpp"
#include "arw/sensor_model.hpp"
#include "arw/vehicle_model.hpp"

namespace arw {
namespace rhem {

struct Params {
  nbv::Params layer1;
  double w_explore = 1.0;
  double w_reobs = 0.0;
  double c_sat = 10.0;       // ReobservationGain saturation count
  int second_layer_paths = 4;  // M
  int layer2_rrt_iterations = 400;
  BeliefNoise noise;
};

// Collision model for the second layer: a path is admissible iff it stays in
// Free voxels of the current map.
inline CollisionFn free_space_checker(const OccupancyMap& map) {
  return [&map](const LocalPath& path) {
    for (std::size_t i = 0; i + 1 < path.waypoints.size(); ++i)
      if (!nbv::segment_in_free_space(map, path.waypoints[i].position,
                                      path.waypoints[i + 1].position))
        return true;
    return false;
  };
}

struct LogRow {
  int step = 0;
  Configuration config;
  double gain = 0.0;
  double known_fraction = 0.0;
  double d_opt_chosen = 0.0;
  double d_opt_best_alternative = 0.0;  // min over the non-chosen candidates
  int n_landmarks_visible = 0;
  bool layer2_fallback = false;
};

struct StepCandidates {
  std::vector<std::vector<Configuration>> paths;
  std::vector<double> d_opts;
  int chosen = -1;
};

struct ExploreResult {
  std::vector<LogRow> log;
  OccupancyMap map;
  Belief belief;
  std::vector<StepCandidates> candidates;  // per step, for post-hoc audit
  std::string termination;
};

// Two-layer uncertainty-aware exploration: layer 1 picks the best exploration
// branch (gain = w_explore * unknown volume + w_reobs * ReobservationGain);
// layer 2 samples >= M admissible paths to the branch's first viewpoint and
// executes the one minimizing D-optimality of the propagated covariance.
inline ExploreResult explore_uncertainty_aware(
    const Bvh& world, const Configuration& start, const SensorModel& sensor,
    const VehicleModel& vehicle, const std::vector<Landmark>& landmark_field,
    const OccupancyMap::Params& map_params, const Params& params, std::uint64_t seed) {
  ExploreResult result{{}, OccupancyMap(map_params), make_belief(start, landmark_field),
                       {}, ""};
  OccupancyMap& map = result.map;
  Configuration config = start;

  nbv::GainFn gain_fn = [&params](const OccupancyMap& m, const Configuration& c,
                                  const SensorModel& s) {
    double g = params.w_explore * nbv::node_gain(m, c, s);
    if (params.w_reobs != 0.0) g += params.w_reobs * m.reobservation_gain(c, s, params.c_sat);
    return g;
  };

  for (int step = 0; step < params.layer1.max_steps; ++step) {
    auto scan = simulate_scan(sensor, config, world, params.layer1.scan_rays_h,
                              params.layer1.scan_rays_v);
    map.integrate_scan(config.position, scan, sensor.d_max);

    // Layer 1: same stream layout as the plain explorer so the w_reobs = 0
    // reduction reproduces its tree exactly.
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(step + 1));
    std::vector<nbv::ViewNode> tree;
    try {
      tree = nbv::build_view_tree(map, vehicle, sensor, config, params.layer1, rng, gain_fn);
    } catch (const RootNotFree&) {
      result.log.push_back({step, config, 0.0, map.known_fraction(), 0.0, 0.0, 0, false});
      result.termination = "stuck";
      return result;
    }
    int best = nbv::best_branch(tree);

    LogRow row;
    row.step = step;
    row.config = config;
    row.gain = tree[best].value;
    row.known_fraction = map.known_fraction();
    int n_vis = 0;
    for (const auto& lm : landmark_field)
      if (lm.active && landmark_visible(sensor, config, lm.position, &world)) ++n_vis;
    row.n_landmarks_visible = n_vis;

    if (tree[best].value < params.layer1.g_min) {
      result.log.push_back(row);
      result.termination = "gain";
      return result;
    }
    if (tree.size() < 2 || best == 0) {
      result.log.push_back(row);
      result.termination = "stuck";
      return result;
    }
    Configuration sigma_star = tree[nbv::first_vertex_of_branch(tree, best)].config;

    // Layer 2: sampled admissible paths to sigma*, scored by the D-optimality
    // of the propagated belief.
    StepCandidates cands;
    SearchParams sp;
    sp.bounds.expand(map_params.lo);
    sp.bounds.expand(map_params.hi);
    sp.stop_at_first = true;
    SearchBudget budget{params.layer2_rrt_iterations, 0.0};
    auto checker = free_space_checker(map);
    for (int m = 0; m < params.second_layer_paths; ++m) {
      std::uint64_t cand_seed = seed + 0x51ed270b9ULL * static_cast<std::uint64_t>(step + 1) +
                                static_cast<std::uint64_t>(m) * 7919ULL;
      try {
        auto p = plan_point_to_point(vehicle, checker, config, sigma_star, sp, budget,
                                     cand_seed);
        if (p) cands.paths.push_back(*p);
      } catch (const StartInCollision&) {
        break;
      }
    }
    if (cands.paths.empty()) {
      // Fall back to the layer-1 edge path.
      cands.paths.push_back({config, sigma_star});
      row.layer2_fallback = true;
    }

    double best_dopt = kInf, second_dopt = kInf;
    int chosen = 0;
    std::vector<Belief> propagated;
    for (std::size_t m = 0; m < cands.paths.size(); ++m) {
      Belief b = result.belief;
      bool broken = false;
      for (std::size_t i = 0; i + 1 < cands.paths[m].size(); ++i) {
        auto leg = connect(vehicle, cands.paths[m][i], cands.paths[m][i + 1]);
        if (!leg) { broken = true; break; }
        b = propagate_belief(b, *leg, sensor, params.noise, &world);
      }
      double dopt = kInf;
      if (!broken) {
        try {
          dopt = d_optimality(b.cov);
        } catch (const NotSPD&) {
          dopt = kInf;
        }
      }
      cands.d_opts.push_back(dopt);
      propagated.push_back(std::move(b));
      if (dopt < best_dopt) {
        second_dopt = best_dopt;
        best_dopt = dopt;
        chosen = static_cast<int>(m);
      } else if (dopt < second_dopt) {
        second_dopt = dopt;
      }
    }
    cands.chosen = chosen;
    row.d_opt_chosen = best_dopt;
    row.d_opt_best_alternative = cands.d_opts.size() > 1 ? second_dopt : best_dopt;
    result.log.push_back(row);
    result.candidates.push_back(std::move(cands));

    result.belief = std::move(propagated[chosen]);
    result.belief.pose = sigma_star;
    config = sigma_star;
  }
  result.termination = "max_steps";
  return result;
}

}  // namespace rhem
}  // namespace arw
