#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "arw/mesh_io.hpp"
#include "arw/scenario.hpp"
#include "arw/shapes.hpp"

namespace arw {

struct MissionReport {
  Mode mode = Mode::Sip;
  bool success = false;
  double total_cost_s = 0.0;
  // Coverage fraction for inspection modes, known-volume fraction for
  // exploration modes, unused for contact.
  double fraction = 0.0;
  double planning_time_s = 0.0;  // wall clock; reported, never written to files
  std::vector<std::string> warnings;
  std::string error_code;
  std::string error_message;
};

namespace detail {

inline std::string fmt6(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

// Trajectory CSV with estimated execution timestamps accumulated from the
// vehicle local-path costs between consecutive configurations.
inline void write_path_csv(const std::string& path, const VehicleModel& vehicle,
                           const std::vector<Configuration>& configs) {
  std::ofstream out(path);
  if (!out) throw FileNotFound(path);
  out << "t_est_s,x_m,y_m,z_m,yaw_rad\n";
  double t = 0.0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (i > 0) {
      auto leg = connect(vehicle, configs[i - 1], configs[i]);
      t += leg ? leg->cost : 0.0;
    }
    out << fmt6(t) << "," << fmt6(configs[i].position.x) << ","
        << fmt6(configs[i].position.y) << "," << fmt6(configs[i].position.z) << ","
        << fmt6(configs[i].yaw) << "\n";
  }
}

inline void write_metrics(const std::string& path, const MissionReport& r) {
  json j;
  j["mode"] = to_string(r.mode);
  j["success"] = r.success;
  j["total_cost_s"] = r.total_cost_s;
  j["fraction"] = r.fraction;
  j["warnings"] = r.warnings;
  if (!r.success) j["error"] = {{"code", r.error_code}, {"message", r.error_message}};
  std::ofstream out(path);
  if (!out) throw FileNotFound(path);
  out << j.dump(2) << "\n";
}

inline Aabb default_rrtot_bounds(const TriangleMesh& mesh, const Scenario& sc) {
  if (sc.rrtot.sampling_bounds.valid()) return sc.rrtot.sampling_bounds;
  return mesh.bounds().inflated(sc.vehicle.clearance + 1.5);
}

}  // namespace detail

// Dispatches the scenario to its planner and writes all per-mode output files
// into `out_dir`. Always writes metrics.json, with an error block on failure.
inline MissionReport run_mission(const Scenario& sc, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto at = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };

  MissionReport report;
  report.mode = sc.mode;
  auto t0 = std::chrono::steady_clock::now();

  try {
    switch (sc.mode) {
      case Mode::Sip: {
        TriangleMesh structure_mesh = load_mesh(sc.structure_mesh);
        TriangleMesh world_mesh =
            sc.world_mesh == sc.structure_mesh ? structure_mesh : load_mesh(sc.world_mesh);
        Bvh structure(structure_mesh), world(world_mesh);
        auto res = sip::plan_inspection(structure, sc.sensor, sc.vehicle, world, sc.sip, sc.seed);
        report.warnings = res.warnings;
        report.total_cost_s = res.path.cost;
        std::size_t active = structure_mesh.face_count() - res.excluded_faces.size();
        std::size_t covered = 0;
        for (std::size_t f : res.path.covered_faces) {
          bool excluded = false;
          for (std::size_t e : res.excluded_faces)
            if (e == f) { excluded = true; break; }
          if (!excluded) ++covered;
        }
        report.fraction = active ? static_cast<double>(covered) / active : 0.0;
        detail::write_path_csv(at("path.csv"), sc.vehicle, flatten(res.path));
        std::ofstream hist(at("history.csv"));
        hist << "iteration,best_cost_s\n";
        for (std::size_t i = 0; i < res.cost_history.size(); ++i)
          hist << i << "," << detail::fmt6(res.cost_history[i]) << "\n";
        break;
      }
      case Mode::Rrtot: {
        TriangleMesh structure_mesh = load_mesh(sc.structure_mesh);
        TriangleMesh world_mesh =
            sc.world_mesh == sc.structure_mesh ? structure_mesh : load_mesh(sc.world_mesh);
        Bvh structure(structure_mesh), world(world_mesh);
        rrtot::Params params = sc.rrtot;
        params.sampling_bounds = detail::default_rrtot_bounds(structure_mesh, sc);
        auto res = rrtot::plan_optimal_inspection(structure, sc.sensor, sc.vehicle, world,
                                                  sc.start, params, sc.rrtot_iterations,
                                                  sc.rrtot_checkpoint, sc.seed);
        report.total_cost_s = res.path.cost;
        report.fraction = static_cast<double>(res.path.covered_faces.size()) /
                          structure_mesh.face_count();
        detail::write_path_csv(at("path.csv"), sc.vehicle, flatten(res.path));
        std::ofstream hist(at("history.csv"));
        hist << "iteration,best_cost_s\n";
        for (const auto& [it, cost] : res.cost_history)
          hist << it << "," << detail::fmt6(cost) << "\n";
        break;
      }
      case Mode::Uc3d: {
        TriangleMesh structure_mesh = load_mesh(sc.structure_mesh);
        auto res = uc3d::plan_uniform_inspection(structure_mesh, sc.uc3d, sc.sensor,
                                                 sc.vehicle, sc.uc3d_max_restarts, sc.seed);
        report.total_cost_s = res.path.cost;
        report.fraction = static_cast<double>(res.path.covered_faces.size()) /
                          res.subsampled.face_count();
        detail::write_path_csv(at("path.csv"), sc.vehicle, flatten(res.path));
        save_obj(res.subsampled, at("subsampled.obj"));
        std::ofstream audit(at("audit.csv"));
        audit << "stop,distance_m,angle_rad\n";
        for (std::size_t i = 0; i < res.audit.size(); ++i)
          audit << i << "," << detail::fmt6(res.audit[i].first) << ","
                << detail::fmt6(res.audit[i].second) << "\n";
        break;
      }
      case Mode::Nbv: {
        TriangleMesh world_mesh = load_mesh(sc.world_mesh);
        Bvh world(world_mesh);
        auto res = nbv::explore(world, sc.start, sc.sensor, sc.vehicle, sc.map, sc.nbv, sc.seed);
        report.fraction = res.log.empty() ? 0.0 : res.log.back().known_fraction;
        report.warnings.push_back("termination: " + res.termination);
        std::vector<Configuration> configs;
        std::ofstream log(at("log.csv"));
        log << "step,x_m,y_m,z_m,yaw_rad,gain,known_fraction\n";
        for (const auto& row : res.log) {
          configs.push_back(row.config);
          log << row.step << "," << detail::fmt6(row.config.position.x) << ","
              << detail::fmt6(row.config.position.y) << ","
              << detail::fmt6(row.config.position.z) << "," << detail::fmt6(row.config.yaw)
              << "," << detail::fmt6(row.gain) << "," << detail::fmt6(row.known_fraction)
              << "\n";
        }
        report.total_cost_s = path_cost(sc.vehicle, configs);
        detail::write_path_csv(at("path.csv"), sc.vehicle, configs);
        res.map.export_occupied_ply(at("map.ply"));
        res.map.dump_binary(at("map.bin"));
        break;
      }
      case Mode::Rhem: {
        TriangleMesh world_mesh = load_mesh(sc.world_mesh);
        Bvh world(world_mesh);
        auto res = rhem::explore_uncertainty_aware(world, sc.start, sc.sensor, sc.vehicle,
                                                   sc.landmarks, sc.map, sc.rhem, sc.seed);
        report.fraction = res.log.empty() ? 0.0 : res.log.back().known_fraction;
        report.warnings.push_back("termination: " + res.termination);
        std::vector<Configuration> configs;
        std::ofstream log(at("log.csv"));
        log << "step,x_m,y_m,z_m,yaw_rad,gain,known_fraction,d_opt_chosen,"
               "d_opt_best_alternative,n_landmarks_visible,layer2_fallback\n";
        for (const auto& row : res.log) {
          configs.push_back(row.config);
          log << row.step << "," << detail::fmt6(row.config.position.x) << ","
              << detail::fmt6(row.config.position.y) << ","
              << detail::fmt6(row.config.position.z) << "," << detail::fmt6(row.config.yaw)
              << "," << detail::fmt6(row.gain) << "," << detail::fmt6(row.known_fraction)
              << "," << detail::fmt6(row.d_opt_chosen) << ","
              << detail::fmt6(row.d_opt_best_alternative) << "," << row.n_landmarks_visible
              << "," << (row.layer2_fallback ? 1 : 0) << "\n";
        }
        report.total_cost_s = path_cost(sc.vehicle, configs);
        detail::write_path_csv(at("path.csv"), sc.vehicle, configs);
        res.map.export_occupied_ply(at("map.ply"));
        res.map.dump_binary(at("map.bin"));
        break;
      }
      case Mode::Contact: {
        auto res = contact::plan_contact_tour(sc.contact, sc.contact_start_poi,
                                              sc.contact_tsp_restarts, sc.seed);
        report.total_cost_s = res.total_cost;
        report.fraction = 1.0;
        std::ofstream out(at("contact.csv"));
        out << "mode,x_m,y_m,z_m\n";
        for (const auto& leg : res.legs) {
          const char* mode = leg.mode == contact::LegMode::InContact ? "contact" : "fly";
          for (const auto& w : leg.waypoints)
            out << mode << "," << detail::fmt6(w.x) << "," << detail::fmt6(w.y) << ","
                << detail::fmt6(w.z) << "\n";
        }
        break;
      }
    }
    report.success = true;
  } catch (const Error& e) {
    report.success = false;
    report.error_code = e.code();
    report.error_message = e.what();
  }

  report.planning_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail::write_metrics(at("metrics.json"), report);
  return report;
}

}  // namespace arw
