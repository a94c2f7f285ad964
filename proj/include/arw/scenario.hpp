#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arw/contact.hpp"
#include "arw/errors.hpp"
#include "arw/nbv.hpp"
#include "arw/occupancy_map.hpp"
#include "arw/rhem.hpp"
#include "arw/rrtot.hpp"
#include "arw/sensor_model.hpp"
#include "arw/sip.hpp"
#include "arw/uc3d.hpp"
#include "arw/vehicle_model.hpp"

namespace arw {

using json = nlohmann::json;

enum class Mode { Sip, Rrtot, Uc3d, Nbv, Rhem, Contact };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::Sip: return "sip";
    case Mode::Rrtot: return "rrtot";
    case Mode::Uc3d: return "uc3d";
    case Mode::Nbv: return "nbv";
    case Mode::Rhem: return "rhem";
    case Mode::Contact: return "contact";
  }
  return "?";
}

struct Scenario {
  Mode mode = Mode::Sip;
  std::uint64_t seed = 0;
  std::string out_dir;        // optional; CLI/env may override
  std::string world_mesh;     // ground-truth world (all modes except contact)
  std::string structure_mesh; // inspection target; defaults to world_mesh

  Configuration start;
  SensorModel sensor;
  VehicleModel vehicle;
  OccupancyMap::Params map;

  sip::Params sip;
  rrtot::Params rrtot;
  int rrtot_iterations = 20000;
  int rrtot_checkpoint = 2000;
  uc3d::UniformityParams uc3d;
  int uc3d_max_restarts = 10;
  nbv::Params nbv;
  rhem::Params rhem;
  std::vector<Landmark> landmarks;
  contact::SurfaceTask contact;
  std::size_t contact_start_poi = 0;
  int contact_tsp_restarts = 5;
};

namespace detail {

inline void check_keys(const json& j, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) { ok = true; break; }
    if (!ok) throw SchemaError(path + "." + it.key(), "unknown key");
  }
}

inline double get_num(const json& j, const std::string& path, const char* key,
                      double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw SchemaError(path + "." + key, "expected number");
  return j[key].get<double>();
}

inline Vec3 get_vec3(const json& j, const std::string& path, const char* key,
                     const Vec3& fallback) {
  if (!j.contains(key)) return fallback;
  const json& a = j[key];
  if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() ||
      !a[2].is_number())
    throw SchemaError(path + "." + key, "expected [x, y, z]");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

inline json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

inline void parse_sensor(const json& j, SensorModel& s) {
  check_keys(j, "sensor",
             {"hfov_deg", "vfov_deg", "d_min_m", "d_max_m", "incidence_deg", "pitch_deg"});
  s.hfov = get_num(j, "sensor", "hfov_deg", s.hfov * 180.0 / kPi) * kPi / 180.0;
  s.vfov = get_num(j, "sensor", "vfov_deg", s.vfov * 180.0 / kPi) * kPi / 180.0;
  s.d_min = get_num(j, "sensor", "d_min_m", s.d_min);
  s.d_max = get_num(j, "sensor", "d_max_m", s.d_max);
  s.max_incidence =
      get_num(j, "sensor", "incidence_deg", s.max_incidence * 180.0 / kPi) * kPi / 180.0;
  s.pitch = get_num(j, "sensor", "pitch_deg", s.pitch * 180.0 / kPi) * kPi / 180.0;
  if (s.hfov <= 0 || s.hfov >= kPi || s.vfov <= 0 || s.vfov >= kPi)
    throw SchemaError("sensor", "FOV must be in (0, 180) degrees");
  if (s.d_min < 0 || s.d_min >= s.d_max)
    throw SchemaError("sensor", "requires 0 <= d_min_m < d_max_m");
  if (s.max_incidence <= 0 || s.max_incidence > kPi / 2)
    throw SchemaError("sensor", "incidence_deg must be in (0, 90]");
}

inline void parse_vehicle(const json& j, VehicleModel& v) {
  check_keys(j, "vehicle", {"kind", "v_max", "yaw_rate_max", "clearance"});
  if (j.contains("kind")) {
    std::string k = j["kind"].get<std::string>();
    if (k == "holonomic") v.kind = VehicleKind::Holonomic;
    else if (k == "nonholonomic") v.kind = VehicleKind::Nonholonomic;
    else throw SchemaError("vehicle.kind", "expected holonomic or nonholonomic");
  }
  v.v_max = get_num(j, "vehicle", "v_max", v.v_max);
  v.yaw_rate_max = get_num(j, "vehicle", "yaw_rate_max", v.yaw_rate_max);
  v.clearance = get_num(j, "vehicle", "clearance", v.clearance);
  if (v.v_max <= 0 || v.yaw_rate_max <= 0 || v.clearance < 0)
    throw SchemaError("vehicle", "requires v_max > 0, yaw_rate_max > 0, clearance >= 0");
}

inline void parse_map(const json& j, OccupancyMap::Params& m) {
  check_keys(j, "map", {"resolution", "lo", "hi"});
  m.resolution = get_num(j, "map", "resolution", m.resolution);
  m.lo = get_vec3(j, "map", "lo", m.lo);
  m.hi = get_vec3(j, "map", "hi", m.hi);
  if (m.resolution <= 0) throw SchemaError("map.resolution", "must be > 0");
  if (!(m.lo.x < m.hi.x && m.lo.y < m.hi.y && m.lo.z < m.hi.z))
    throw SchemaError("map", "requires lo < hi per axis");
}

inline void parse_nbv(const json& j, const std::string& path, nbv::Params& p) {
  check_keys(j, path, {"tree_nodes", "max_edge", "lambda", "g_min", "max_steps",
                       "scan_rays_h", "scan_rays_v"});
  p.tree_nodes = static_cast<int>(get_num(j, path, "tree_nodes", p.tree_nodes));
  p.max_edge = get_num(j, path, "max_edge", p.max_edge);
  p.lambda = get_num(j, path, "lambda", p.lambda);
  p.g_min = get_num(j, path, "g_min", p.g_min);
  p.max_steps = static_cast<int>(get_num(j, path, "max_steps", p.max_steps));
  p.scan_rays_h = static_cast<int>(get_num(j, path, "scan_rays_h", p.scan_rays_h));
  p.scan_rays_v = static_cast<int>(get_num(j, path, "scan_rays_v", p.scan_rays_v));
  if (p.tree_nodes < 1 || p.max_edge <= 0 || p.max_steps < 1 || p.scan_rays_h < 2 ||
      p.scan_rays_v < 2)
    throw SchemaError(path, "out-of-range exploration parameter");
}

}  // namespace detail

// Strict-schema scenario loader: unknown keys are rejected with their path,
// missing optional keys take documented defaults, mode and seed are mandatory.
inline Scenario parse_scenario(const json& j) {
  detail::check_keys(j, "$",
                     {"mode", "seed", "out_dir", "world_mesh", "structure_mesh", "start",
                      "sensor", "vehicle", "map", "sip", "rrtot", "uc3d", "nbv", "rhem",
                      "contact"});
  Scenario s;
  if (!j.contains("mode")) throw SchemaError("mode", "required");
  std::string mode = j["mode"].get<std::string>();
  if (mode == "sip") s.mode = Mode::Sip;
  else if (mode == "rrtot") s.mode = Mode::Rrtot;
  else if (mode == "uc3d") s.mode = Mode::Uc3d;
  else if (mode == "nbv") s.mode = Mode::Nbv;
  else if (mode == "rhem") s.mode = Mode::Rhem;
  else if (mode == "contact") s.mode = Mode::Contact;
  else throw SchemaError("mode", "expected one of sip, rrtot, uc3d, nbv, rhem, contact");

  if (!j.contains("seed")) throw SchemaError("seed", "required");
  if (!j["seed"].is_number_integer() ||
      (j["seed"].is_number_integer() && !j["seed"].is_number_unsigned() &&
       j["seed"].get<std::int64_t>() < 0))
    throw SchemaError("seed", "expected unsigned integer");
  s.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out_dir")) s.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("world_mesh")) s.world_mesh = j["world_mesh"].get<std::string>();
  if (j.contains("structure_mesh")) s.structure_mesh = j["structure_mesh"].get<std::string>();
  if (s.structure_mesh.empty()) s.structure_mesh = s.world_mesh;
  if (s.mode != Mode::Contact && s.world_mesh.empty() && s.structure_mesh.empty())
    throw SchemaError("world_mesh", "required for mode " + mode);

  if (j.contains("start")) {
    const json& st = j["start"];
    detail::check_keys(st, "start", {"position", "yaw"});
    Vec3 p = detail::get_vec3(st, "start", "position", {0, 0, 0});
    double yaw = detail::get_num(st, "start", "yaw", 0.0);
    s.start = Configuration(p, yaw);
  }
  if (j.contains("sensor")) detail::parse_sensor(j["sensor"], s.sensor);
  if (j.contains("vehicle")) detail::parse_vehicle(j["vehicle"], s.vehicle);
  if (j.contains("map")) detail::parse_map(j["map"], s.map);

  if (j.contains("sip")) {
    const json& p = j["sip"];
    detail::check_keys(p, "sip",
                       {"iterations", "candidates_per_face", "tsp_restarts", "rrt_iterations"});
    s.sip.iterations = static_cast<int>(detail::get_num(p, "sip", "iterations", s.sip.iterations));
    s.sip.candidates_per_face = static_cast<int>(
        detail::get_num(p, "sip", "candidates_per_face", s.sip.candidates_per_face));
    s.sip.tsp_restarts =
        static_cast<int>(detail::get_num(p, "sip", "tsp_restarts", s.sip.tsp_restarts));
    s.sip.rrt_iterations =
        static_cast<int>(detail::get_num(p, "sip", "rrt_iterations", s.sip.rrt_iterations));
  }
  if (j.contains("rrtot")) {
    const json& p = j["rrtot"];
    detail::check_keys(p, "rrtot",
                       {"iterations", "checkpoint_period", "p_new", "steer", "bounds_lo",
                        "bounds_hi", "tsp_restarts"});
    s.rrtot_iterations =
        static_cast<int>(detail::get_num(p, "rrtot", "iterations", s.rrtot_iterations));
    s.rrtot_checkpoint =
        static_cast<int>(detail::get_num(p, "rrtot", "checkpoint_period", s.rrtot_checkpoint));
    s.rrtot.p_new = detail::get_num(p, "rrtot", "p_new", s.rrtot.p_new);
    s.rrtot.steer_limit = detail::get_num(p, "rrtot", "steer", s.rrtot.steer_limit);
    s.rrtot.tsp_restarts =
        static_cast<int>(detail::get_num(p, "rrtot", "tsp_restarts", s.rrtot.tsp_restarts));
    if (p.contains("bounds_lo") || p.contains("bounds_hi")) {
      s.rrtot.sampling_bounds = Aabb{};
      s.rrtot.sampling_bounds.expand(detail::get_vec3(p, "rrtot", "bounds_lo", {0, 0, 0}));
      s.rrtot.sampling_bounds.expand(detail::get_vec3(p, "rrtot", "bounds_hi", {0, 0, 0}));
    }
  }
  if (j.contains("uc3d")) {
    const json& p = j["uc3d"];
    detail::check_keys(p, "uc3d",
                       {"d_star", "eps_d", "eps_theta_deg", "target_faces", "max_restarts"});
    s.uc3d.d_star = detail::get_num(p, "uc3d", "d_star", s.uc3d.d_star);
    s.uc3d.eps_d = detail::get_num(p, "uc3d", "eps_d", s.uc3d.eps_d);
    s.uc3d.eps_theta =
        detail::get_num(p, "uc3d", "eps_theta_deg", s.uc3d.eps_theta * 180.0 / kPi) * kPi /
        180.0;
    s.uc3d.target_faces = static_cast<std::size_t>(
        detail::get_num(p, "uc3d", "target_faces", static_cast<double>(s.uc3d.target_faces)));
    s.uc3d_max_restarts =
        static_cast<int>(detail::get_num(p, "uc3d", "max_restarts", s.uc3d_max_restarts));
    if (!s.uc3d.valid(s.sensor)) throw SchemaError("uc3d", "uniformity parameters invalid");
  }
  if (j.contains("nbv")) detail::parse_nbv(j["nbv"], "nbv", s.nbv);
  if (j.contains("rhem")) {
    const json& p = j["rhem"];
    detail::check_keys(p, "rhem",
                       {"layer1", "w_explore", "w_reobs", "c_sat", "second_layer_paths",
                        "layer2_rrt_iterations", "landmarks"});
    if (p.contains("layer1")) detail::parse_nbv(p["layer1"], "rhem.layer1", s.rhem.layer1);
    s.rhem.w_explore = detail::get_num(p, "rhem", "w_explore", s.rhem.w_explore);
    s.rhem.w_reobs = detail::get_num(p, "rhem", "w_reobs", s.rhem.w_reobs);
    s.rhem.c_sat = detail::get_num(p, "rhem", "c_sat", s.rhem.c_sat);
    s.rhem.second_layer_paths = static_cast<int>(
        detail::get_num(p, "rhem", "second_layer_paths", s.rhem.second_layer_paths));
    s.rhem.layer2_rrt_iterations = static_cast<int>(
        detail::get_num(p, "rhem", "layer2_rrt_iterations", s.rhem.layer2_rrt_iterations));
    if (p.contains("landmarks")) {
      for (std::size_t i = 0; i < p["landmarks"].size(); ++i) {
        const json& lj = p["landmarks"][i];
        std::string path = "rhem.landmarks[" + std::to_string(i) + "]";
        detail::check_keys(lj, path, {"id", "position"});
        Landmark lm;
        lm.id = static_cast<int>(detail::get_num(lj, path, "id", static_cast<double>(i)));
        lm.position = detail::get_vec3(lj, path, "position", {0, 0, 0});
        s.landmarks.push_back(lm);
      }
    }
  }
  if (j.contains("contact")) {
    const json& p = j["contact"];
    detail::check_keys(p, "contact",
                       {"plane_point", "plane_normal", "pois", "obstacles", "clearance",
                        "contact_speed", "flight_speed", "start_poi", "tsp_restarts"});
    Vec3 pp = detail::get_vec3(p, "contact", "plane_point", {0, 0, 0});
    Vec3 pn = detail::get_vec3(p, "contact", "plane_normal", {0, 0, 1});
    double cl = detail::get_num(p, "contact", "clearance", 0.3);
    double cs = detail::get_num(p, "contact", "contact_speed", 0.1);
    double fs = detail::get_num(p, "contact", "flight_speed", 0.5);
    s.contact = contact::make_wall_task(pp, pn);
    s.contact.undock_clearance = cl;
    s.contact.contact_speed = cs;
    s.contact.flight_speed = fs;
    auto read_pt = [&](const json& a, const std::string& path) {
      if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
        throw SchemaError(path, "expected [x, y]");
      return contact::Point2{a[0].get<double>(), a[1].get<double>()};
    };
    if (p.contains("pois"))
      for (std::size_t i = 0; i < p["pois"].size(); ++i)
        s.contact.pois.push_back(
            read_pt(p["pois"][i], "contact.pois[" + std::to_string(i) + "]"));
    if (p.contains("obstacles"))
      for (std::size_t i = 0; i < p["obstacles"].size(); ++i) {
        contact::Polygon poly;
        const json& pj = p["obstacles"][i];
        for (std::size_t k = 0; k < pj.size(); ++k)
          poly.push_back(read_pt(
              pj[k], "contact.obstacles[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
        if (poly.size() < 3)
          throw SchemaError("contact.obstacles[" + std::to_string(i) + "]",
                            "polygon needs >= 3 vertices");
        s.contact.obstacles.push_back(poly);
      }
    s.contact_start_poi = static_cast<std::size_t>(
        detail::get_num(p, "contact", "start_poi", static_cast<double>(s.contact_start_poi)));
    s.contact_tsp_restarts = static_cast<int>(
        detail::get_num(p, "contact", "tsp_restarts", s.contact_tsp_restarts));
    if (s.mode == Mode::Contact && s.contact.pois.empty())
      throw SchemaError("contact.pois", "required for mode contact");
    if (s.contact_start_poi >= std::max<std::size_t>(s.contact.pois.size(), 1))
      throw SchemaError("contact.start_poi", "index out of range");
  } else if (s.mode == Mode::Contact) {
    throw SchemaError("contact", "required for mode contact");
  }
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("$", "top level must be an object");
  Scenario s = parse_scenario(j);
  auto resolve = [&](std::string& mesh_path) {
    if (mesh_path.empty()) return;
    std::filesystem::path mp(mesh_path);
    if (mp.is_relative()) mp = std::filesystem::path(path).parent_path() / mp;
    if (!std::filesystem::exists(mp)) throw MissingFile(mp.string());
    mesh_path = mp.string();
  };
  resolve(s.world_mesh);
  resolve(s.structure_mesh);
  return s;
}

// Full serialization with effective values; parse_scenario(serialize(s)) == s.
inline json serialize_scenario(const Scenario& s) {
  json j;
  j["mode"] = to_string(s.mode);
  j["seed"] = s.seed;
  if (!s.out_dir.empty()) j["out_dir"] = s.out_dir;
  if (!s.world_mesh.empty()) j["world_mesh"] = s.world_mesh;
  if (!s.structure_mesh.empty()) j["structure_mesh"] = s.structure_mesh;
  j["start"] = {{"position", detail::vec3_json(s.start.position)}, {"yaw", s.start.yaw}};
  j["sensor"] = {{"hfov_deg", s.sensor.hfov * 180.0 / kPi},
                 {"vfov_deg", s.sensor.vfov * 180.0 / kPi},
                 {"d_min_m", s.sensor.d_min},
                 {"d_max_m", s.sensor.d_max},
                 {"incidence_deg", s.sensor.max_incidence * 180.0 / kPi},
                 {"pitch_deg", s.sensor.pitch * 180.0 / kPi}};
  j["vehicle"] = {
      {"kind", s.vehicle.kind == VehicleKind::Holonomic ? "holonomic" : "nonholonomic"},
      {"v_max", s.vehicle.v_max},
      {"yaw_rate_max", s.vehicle.yaw_rate_max},
      {"clearance", s.vehicle.clearance}};
  j["map"] = {{"resolution", s.map.resolution},
              {"lo", detail::vec3_json(s.map.lo)},
              {"hi", detail::vec3_json(s.map.hi)}};
  j["sip"] = {{"iterations", s.sip.iterations},
              {"candidates_per_face", s.sip.candidates_per_face},
              {"tsp_restarts", s.sip.tsp_restarts},
              {"rrt_iterations", s.sip.rrt_iterations}};
  json rr = {{"iterations", s.rrtot_iterations},
             {"checkpoint_period", s.rrtot_checkpoint},
             {"p_new", s.rrtot.p_new},
             {"steer", s.rrtot.steer_limit},
             {"tsp_restarts", s.rrtot.tsp_restarts}};
  if (s.rrtot.sampling_bounds.valid()) {
    rr["bounds_lo"] = detail::vec3_json(s.rrtot.sampling_bounds.lo);
    rr["bounds_hi"] = detail::vec3_json(s.rrtot.sampling_bounds.hi);
  }
  j["rrtot"] = rr;
  j["uc3d"] = {{"d_star", s.uc3d.d_star},
               {"eps_d", s.uc3d.eps_d},
               {"eps_theta_deg", s.uc3d.eps_theta * 180.0 / kPi},
               {"target_faces", s.uc3d.target_faces},
               {"max_restarts", s.uc3d_max_restarts}};
  auto nbv_json = [](const nbv::Params& p) {
    return json{{"tree_nodes", p.tree_nodes}, {"max_edge", p.max_edge},
                {"lambda", p.lambda},         {"g_min", p.g_min},
                {"max_steps", p.max_steps},   {"scan_rays_h", p.scan_rays_h},
                {"scan_rays_v", p.scan_rays_v}};
  };
  j["nbv"] = nbv_json(s.nbv);
  json lms = json::array();
  for (const auto& lm : s.landmarks)
    lms.push_back({{"id", lm.id}, {"position", detail::vec3_json(lm.position)}});
  j["rhem"] = {{"layer1", nbv_json(s.rhem.layer1)},
               {"w_explore", s.rhem.w_explore},
               {"w_reobs", s.rhem.w_reobs},
               {"c_sat", s.rhem.c_sat},
               {"second_layer_paths", s.rhem.second_layer_paths},
               {"layer2_rrt_iterations", s.rhem.layer2_rrt_iterations},
               {"landmarks", lms}};
  if (!s.contact.pois.empty()) {
    json pois = json::array(), obstacles = json::array();
    for (const auto& p : s.contact.pois) pois.push_back({p.x, p.y});
    for (const auto& poly : s.contact.obstacles) {
      json pj = json::array();
      for (const auto& p : poly) pj.push_back({p.x, p.y});
      obstacles.push_back(pj);
    }
    j["contact"] = {{"plane_point", detail::vec3_json(s.contact.plane_point)},
                    {"plane_normal", detail::vec3_json(s.contact.plane_normal)},
                    {"pois", pois},
                    {"obstacles", obstacles},
                    {"clearance", s.contact.undock_clearance},
                    {"contact_speed", s.contact.contact_speed},
                    {"flight_speed", s.contact.flight_speed},
                    {"start_poi", s.contact_start_poi},
                    {"tsp_restarts", s.contact_tsp_restarts}};
  }
  return j;
}

}  // namespace arw
