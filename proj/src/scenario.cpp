#include "wallfinder/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wallfinder/errors.hpp"
#include "wallfinder/rng.hpp"

namespace wallfinder {

namespace {

using nlohmann::json;

// Robot controller streams are keyed by the 8-bit robot id, so anything
// above 255 is free for other consumers.
constexpr std::uint64_t kBusSeedStream = 256;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& context) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ScenarioError("unknown key \"" + it.key() + "\" in " + context);
    }
  }
}

kinematics::Vec2 parse_vec2(const json& value, const std::string& context) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number() ||
      !value[1].is_number()) {
    throw ScenarioError(context + " must be a [x, y] number pair");
  }
  return {value[0].get<double>(), value[1].get<double>()};
}

control::ControllerParams parse_controller(const json& obj,
                                           const std::string& context) {
  check_keys(obj,
             {"move_speed_mm_s", "spin_speed_base_mm_s", "spin_time_s",
              "back_time_s", "corner_window", "corner_proximity_mm",
              "relocalize"},
             context);
  control::ControllerParams params;
  params.move_speed_mm_s = obj.value("move_speed_mm_s", params.move_speed_mm_s);
  params.spin_speed_base_mm_s =
      obj.value("spin_speed_base_mm_s", params.spin_speed_base_mm_s);
  params.spin_time_s = obj.value("spin_time_s", params.spin_time_s);
  params.back_time_s = obj.value("back_time_s", params.back_time_s);
  params.corner_window = obj.value("corner_window", params.corner_window);
  params.corner_proximity_mm =
      obj.value("corner_proximity_mm", params.corner_proximity_mm);
  if (obj.contains("relocalize")) {
    const auto policy = obj.at("relocalize").get<std::string>();
    if (policy == "once") {
      params.relocalize = control::RelocalizePolicy::kOnce;
    } else if (policy == "always") {
      params.relocalize = control::RelocalizePolicy::kAlways;
    } else {
      throw ScenarioError("relocalize must be \"once\" or \"always\", got \"" +
                          policy + "\"");
    }
  }
  return params;
}

Scenario parse_json(const json& root) {
  check_keys(root,
             {"world", "geometry", "robots", "sim", "bus", "duration_s",
              "rotation_theta_deg", "report_period_s", "stream_light_bumpers"},
             "scenario");
  Scenario sc;

  if (root.contains("world")) {
    const auto& w = root.at("world");
    check_keys(w, {"width_mm", "height_mm"}, "world");
    sc.world.width_mm = w.value("width_mm", sc.world.width_mm);
    sc.world.height_mm = w.value("height_mm", sc.world.height_mm);
  }

  if (root.contains("geometry")) {
    const auto& g = root.at("geometry");
    check_keys(g, {"radius_mm", "wheel_base_mm", "mm_per_count"}, "geometry");
    sc.geometry.radius_mm = g.value("radius_mm", sc.geometry.radius_mm);
    sc.geometry.wheel_base_mm =
        g.value("wheel_base_mm", sc.geometry.wheel_base_mm);
    sc.geometry.mm_per_count =
        g.value("mm_per_count", sc.geometry.mm_per_count);
  }

  if (!root.contains("robots") || !root.at("robots").is_array() ||
      root.at("robots").empty()) {
    throw ScenarioError("scenario needs a non-empty \"robots\" array");
  }
  for (const auto& r : root.at("robots")) {
    check_keys(r, {"id", "start_mm", "heading_deg", "controller"}, "robot");
    RobotSpec spec;
    if (!r.contains("id")) {
      throw ScenarioError("every robot needs an \"id\"");
    }
    const auto id = r.at("id").get<std::int64_t>();
    if (id < 0 || id > 255) {
      throw ScenarioError("robot id " + std::to_string(id) +
                          " outside 0..255");
    }
    spec.id = static_cast<std::uint8_t>(id);
    spec.start_mm = {sc.world.width_mm / 2.0, sc.world.height_mm / 2.0};
    if (r.contains("start_mm")) {
      spec.start_mm = parse_vec2(r.at("start_mm"), "robot start_mm");
    }
    spec.heading_deg = r.value("heading_deg", 0.0);
    if (r.contains("controller")) {
      spec.controller = parse_controller(r.at("controller"), "controller");
    }
    sc.robots.push_back(spec);
  }

  if (root.contains("sim")) {
    const auto& s = root.at("sim");
    check_keys(s, {"seed", "control_dt_s", "substeps", "slip"}, "sim");
    sc.sim.seed = s.value("seed", sc.sim.seed);
    sc.sim.control_dt_s = s.value("control_dt_s", sc.sim.control_dt_s);
    sc.sim.substeps = s.value("substeps", sc.sim.substeps);
    if (s.contains("slip")) {
      const auto& slip = s.at("slip");
      check_keys(slip, {"model", "factor"}, "slip");
      const auto model = slip.value("model", std::string("stall"));
      if (model == "stall") {
        sc.sim.slip_model = sim::SlipModel::kStall;
      } else if (model == "slip") {
        sc.sim.slip_model = sim::SlipModel::kSlip;
        if (!slip.contains("factor")) {
          throw ScenarioError("slip model \"slip\" needs a \"factor\"");
        }
        sc.sim.slip_factor = slip.at("factor").get<double>();
      } else {
        throw ScenarioError("slip model must be \"stall\" or \"slip\"");
      }
    }
  }

  if (root.contains("bus")) {
    const auto& b = root.at("bus");
    check_keys(b, {"drop_probability", "latency_ticks", "seed"}, "bus");
    sc.bus.drop_probability =
        b.value("drop_probability", sc.bus.drop_probability);
    sc.bus.latency_ticks = b.value("latency_ticks", sc.bus.latency_ticks);
    if (b.contains("seed")) {
      sc.bus.seed = b.at("seed").get<std::uint64_t>();
      sc.bus_seed_explicit = true;
    }
  }
  if (!sc.bus_seed_explicit) {
    sc.bus.seed = derive_seed(sc.sim.seed, kBusSeedStream);
  }

  sc.duration_s = root.value("duration_s", sc.duration_s);
  sc.rotation_theta_deg =
      root.value("rotation_theta_deg", sc.rotation_theta_deg);
  sc.report_period_s = root.value("report_period_s", sc.report_period_s);
  sc.stream_light_bumpers =
      root.value("stream_light_bumpers", sc.stream_light_bumpers);

  sc.validate();
  return sc;
}

}  // namespace

void Scenario::reseed(std::uint64_t seed) {
  sim.seed = seed;
  if (!bus_seed_explicit) {
    bus.seed = derive_seed(seed, kBusSeedStream);
  }
}

void Scenario::validate() const {
  try {
    world.validate(geometry.radius_mm);
    sim.validate();
    bus.validate();
  } catch (const Error& e) {
    throw ScenarioError(e.what());
  }
  if (geometry.radius_mm <= 0.0 || geometry.wheel_base_mm <= 0.0 ||
      geometry.mm_per_count <= 0.0) {
    throw ScenarioError("robot geometry values must be positive");
  }
  if (duration_s < 0.0) {
    throw ScenarioError("duration_s must be non-negative");
  }
  if (report_period_s <= 0.0) {
    throw ScenarioError("report_period_s must be positive");
  }
  std::set<std::uint8_t> ids;
  for (const auto& robot : robots) {
    if (!ids.insert(robot.id).second) {
      throw ScenarioError("duplicate robot id " + std::to_string(robot.id));
    }
    const double r = geometry.radius_mm;
    if (robot.start_mm.x < r || robot.start_mm.x > world.width_mm - r ||
        robot.start_mm.y < r || robot.start_mm.y > world.height_mm - r) {
      throw ScenarioError("robot " + std::to_string(robot.id) +
                          " starts outside the walls");
    }
    try {
      robot.controller.validate();
    } catch (const Error& e) {
      throw ScenarioError("robot " + std::to_string(robot.id) + ": " +
                          e.what());
    }
  }
  if (robots.empty()) {
    throw ScenarioError("scenario needs at least one robot");
  }
}

Scenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") +
                        e.what());
  }
  try {
    return parse_json(root);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario field has the wrong type: ") +
                        e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("cannot open scenario file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

}  // namespace wallfinder
