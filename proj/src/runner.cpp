#include "wallfinder/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wallfinder/errors.hpp"
#include "wallfinder/oi_protocol.hpp"
#include "wallfinder/rng.hpp"

namespace wallfinder {

namespace {

using nlohmann::json;

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

struct RobotInstance {
  RobotInstance(RobotSpec s, const sim::SimRobot& b, control::WallFinder c)
      : spec(s), body(b), controller(std::move(c)) {}

  RobotSpec spec;
  sim::SimRobot body;
  control::WallFinder controller;
  swarm::PeerTable peers;
  std::uint16_t next_seq = 1;
  std::optional<std::uint64_t> last_report_tick;
  std::optional<std::uint64_t> localized_tick;
  std::optional<control::CornerId> corner;
  std::optional<kinematics::Vec2> corner_estimate;
  std::uint64_t bump_edges = 0;
  std::uint64_t hits_recorded = 0;
  std::uint64_t reports_sent = 0;
  std::uint64_t reports_received = 0;
  std::string trajectory;
  std::string events;
};

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << body;
  if (!out) {
    throw IoError("short write to " + path.string());
  }
}

json event_base(std::uint64_t tick, double now_s, const char* type) {
  json e;
  e["tick"] = tick;
  e["time_s"] = round3(now_s);
  e["type"] = type;
  return e;
}

// Sensor values -> wire frame -> parsed frame, as the serial link would
// deliver them.
oi::QueryFrame sensor_frame(const RobotInstance& robot, const Scenario& sc,
                            const WorldConfig& world) {
  std::vector<oi::ParsedPacket> packets;
  packets.push_back(
      {oi::kBumpsWheelDrops, sim::sense_bumps(robot.body.last_contact)});
  const auto counts = sim::sense_encoders(robot.body);
  packets.push_back({oi::kEncoderLeft, counts.left});
  packets.push_back({oi::kEncoderRight, counts.right});
  if (sc.stream_light_bumpers) {
    const auto light = sim::sense_light_bumpers(robot.body, world);
    packets.push_back({oi::kLightBumper, light.bits});
    for (std::size_t i = 0; i < light.signals.size(); ++i) {
      packets.push_back(
          {static_cast<std::uint8_t>(oi::kLightBumpLeftSignal + i),
           oi::LightBumpSignal{light.signals[i]}});
    }
  }
  const auto wire = oi::encode_query_stream(packets);
  auto frames = oi::parse_query_stream(wire);
  return std::move(frames.front());
}

}  // namespace

RunResult run_scenario(const Scenario& scenario,
                       const std::filesystem::path& out_dir) {
  scenario.validate();

  const double dt = scenario.sim.control_dt_s;
  const auto n_ticks =
      static_cast<std::uint64_t>(std::llround(scenario.duration_s / dt));
  const auto report_period_ticks = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(
             std::llround(scenario.report_period_s / dt)));

  std::vector<RobotInstance> robots;
  std::vector<std::uint8_t> ids;
  for (const auto& spec : scenario.robots) {
    ids.push_back(spec.id);
    const double heading = kinematics::deg_to_rad(spec.heading_deg);
    sim::SimRobot body;
    body.true_pose = {spec.start_mm.x, spec.start_mm.y,
                      kinematics::normalize_angle(heading)};
    body.geometry = scenario.geometry;
    RobotInstance inst{
        spec, body,
        control::WallFinder(spec.controller, scenario.geometry, scenario.world,
                            heading, derive_seed(scenario.sim.seed, spec.id))};
    inst.trajectory =
        "tick,time_s,true_x,true_y,true_theta,est_x,est_y,est_theta,"
        "bump_byte,enc_left,enc_right\n";
    robots.push_back(std::move(inst));
  }
  std::sort(robots.begin(), robots.end(),
            [](const RobotInstance& a, const RobotInstance& b) {
              return a.spec.id < b.spec.id;
            });

  swarm::BroadcastBus bus(scenario.bus, ids);

  for (std::uint64_t tick = 0; tick <= n_ticks; ++tick) {
    const double now = static_cast<double>(tick) * dt;

    for (auto& robot : robots) {
      const auto frame = sensor_frame(robot, scenario, scenario.world);
      oi::BumpState bumps;
      oi::EncoderCounts counts;
      for (const auto& packet : frame.packets) {
        switch (packet.id) {
          case oi::kBumpsWheelDrops:
            bumps = std::get<oi::BumpState>(packet.value);
            break;
          case oi::kEncoderLeft:
            counts.left = std::get<std::int16_t>(packet.value);
            break;
          case oi::kEncoderRight:
            counts.right = std::get<std::int16_t>(packet.value);
            break;
          default:
            break;
        }
      }

      const auto result = robot.controller.tick(now, bumps, counts);

      const auto wheels = kinematics::wheel_speeds(result.command);
      const auto drive_wire =
          oi::encode_drive_direct(wheels.right_mm_s, wheels.left_mm_s);
      const auto drive = oi::decode_drive_direct(drive_wire);
      robot.body.right_mm_s = drive.right_mm_s;
      robot.body.left_mm_s = drive.left_mm_s;

      const auto& est = robot.controller.estimate();
      if (result.bump_edge) {
        ++robot.bump_edges;
        auto e = event_base(tick, now, "bump");
        e["class"] = control::bump_class_name(result.bump);
        e["est_x_mm"] = round3(est.x_mm);
        e["est_y_mm"] = round3(est.y_mm);
        robot.events += e.dump() + "\n";
      }
      if (result.new_hit) {
        ++robot.hits_recorded;
      }
      if (result.corner_detected) {
        robot.corner = result.corner;
        robot.corner_estimate = result.corner_estimate_mm;
        auto e = event_base(tick, now, "corner_detected");
        e["corner"] = control::corner_name(*result.corner);
        e["estimate_x_mm"] = round3(result.corner_estimate_mm.x);
        e["estimate_y_mm"] = round3(result.corner_estimate_mm.y);
        robot.events += e.dump() + "\n";
      }
      if (result.localized_now) {
        robot.localized_tick = tick;
        auto e = event_base(tick, now, "localized");
        e["corner"] = control::corner_name(*result.corner);
        e["x_mm"] = round3(est.x_mm);
        e["y_mm"] = round3(est.y_mm);
        robot.events += e.dump() + "\n";
      }
      if (result.phase_changed) {
        auto e = event_base(tick, now, "phase");
        e["phase"] = control::phase_name(result.phase);
        robot.events += e.dump() + "\n";
      }

      const auto& pose = robot.body.true_pose;
      const auto byte = oi::encode_bumps(bumps);
      char line[192];
      std::snprintf(line, sizeof(line),
                    "%llu,%.3f,%.3f,%.3f,%.6f,%.3f,%.3f,%.6f,%u,%d,%d\n",
                    static_cast<unsigned long long>(tick), now, pose.x_mm,
                    pose.y_mm, pose.theta_rad, est.x_mm, est.y_mm,
                    est.theta_rad, static_cast<unsigned>(byte.value),
                    static_cast<int>(counts.left),
                    static_cast<int>(counts.right));
      robot.trajectory += line;
    }

    for (auto& robot : robots) {
      const bool just_localized =
          robot.localized_tick && *robot.localized_tick == tick;
      const bool periodic =
          robot.controller.localized() && robot.last_report_tick &&
          tick - *robot.last_report_tick >= report_period_ticks;
      if (!just_localized && !periodic) {
        continue;
      }
      const auto report =
          swarm::make_report(robot.spec.id, robot.next_seq++,
                             robot.controller.estimate(), true);
      const auto wire = swarm::encode_report(report);
      bus.broadcast(robot.spec.id, swarm::decode_report(wire), tick);
      robot.last_report_tick = tick;
      ++robot.reports_sent;
      auto e = event_base(tick, now, "report_sent");
      e["seq"] = report.seq;
      e["x_mm"] = report.x_mm;
      e["y_mm"] = report.y_mm;
      robot.events += e.dump() + "\n";
    }

    for (const auto& delivery : bus.deliver_due(tick)) {
      auto it = std::find_if(robots.begin(), robots.end(),
                             [&](const RobotInstance& r) {
                               return r.spec.id == delivery.recipient;
                             });
      if (it == robots.end()) {
        continue;
      }
      it->peers.update(delivery.report, tick);
      ++it->reports_received;
      auto e = event_base(tick, now, "report_received");
      e["from"] = delivery.report.robot_id;
      e["seq"] = delivery.report.seq;
      e["x_mm"] = delivery.report.x_mm;
      e["y_mm"] = delivery.report.y_mm;
      it->events += e.dump() + "\n";
    }

    if (tick < n_ticks) {
      for (auto& robot : robots) {
        sim::step_control_tick(robot.body, scenario.world, scenario.sim);
      }
    }
  }

  RunResult result;
  result.rows_per_robot = n_ticks + 1;
  result.out_dir = out_dir;

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + out_dir.string());
  }

  for (auto& robot : robots) {
    const auto dir = out_dir / ("robot_" + std::to_string(robot.spec.id));
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      throw IoError("cannot create output directory " + dir.string());
    }

    RobotRunStats stats;
    stats.id = robot.spec.id;
    stats.true_pose = robot.body.true_pose;
    stats.estimate = robot.controller.estimate();
    stats.localized = robot.controller.localized();
    stats.corner = robot.corner;
    stats.corner_estimate_mm = robot.corner_estimate;
    stats.localized_tick = robot.localized_tick;
    stats.bump_edges = robot.bump_edges;
    stats.hits_recorded = robot.hits_recorded;
    stats.reports_sent = robot.reports_sent;
    stats.reports_received = robot.reports_received;
    stats.peers_known = robot.peers.size();

    const kinematics::Vec2 start = robot.spec.start_mm;
    kinematics::Vec2 world_est{stats.estimate.x_mm, stats.estimate.y_mm};
    if (!stats.localized) {
      world_est.x += start.x;
      world_est.y += start.y;
    }
    stats.position_error_mm = kinematics::distance(
        world_est, {stats.true_pose.x_mm, stats.true_pose.y_mm});
    if (stats.corner) {
      const auto corner_world =
          control::corner_world_position(*stats.corner, scenario.world);
      stats.true_corner_mm =
          kinematics::Vec2{corner_world.x - start.x, corner_world.y - start.y};
      if (stats.corner_estimate_mm) {
        stats.corner_error_mm = kinematics::distance(*stats.corner_estimate_mm,
                                                     *stats.true_corner_mm);
      }
    }

    json summary;
    summary["robot_id"] = robot.spec.id;
    summary["rows"] = result.rows_per_robot;
    summary["duration_s"] = scenario.duration_s;
    summary["start_mm"] = {round3(start.x), round3(start.y)};
    summary["heading_deg"] = robot.spec.heading_deg;
    summary["final"] = {
        {"true_x_mm", round3(stats.true_pose.x_mm)},
        {"true_y_mm", round3(stats.true_pose.y_mm)},
        {"true_theta_rad", stats.true_pose.theta_rad},
        {"est_x_mm", round3(stats.estimate.x_mm)},
        {"est_y_mm", round3(stats.estimate.y_mm)},
        {"est_theta_rad", stats.estimate.theta_rad},
        {"est_frame", stats.localized ? "room" : "start"},
        {"world_est_x_mm", round3(world_est.x)},
        {"world_est_y_mm", round3(world_est.y)},
        {"position_error_mm", round3(stats.position_error_mm)},
    };
    summary["localized"] = stats.localized;
    summary["localized_tick"] =
        stats.localized_tick ? json(*stats.localized_tick) : json(nullptr);
    summary["corner"] =
        stats.corner ? json(control::corner_name(*stats.corner))
                     : json(nullptr);
    summary["corner_estimate_mm"] =
        stats.corner_estimate_mm
            ? json({round3(stats.corner_estimate_mm->x),
                    round3(stats.corner_estimate_mm->y)})
            : json(nullptr);
    summary["true_corner_mm"] =
        stats.true_corner_mm ? json({round3(stats.true_corner_mm->x),
                                     round3(stats.true_corner_mm->y)})
                             : json(nullptr);
    summary["corner_error_mm"] =
        stats.corner_error_mm ? json(round3(*stats.corner_error_mm))
                              : json(nullptr);
    summary["bump_count"] = stats.bump_edges;
    summary["hit_count"] = stats.hits_recorded;
    summary["reports_sent"] = stats.reports_sent;
    summary["reports_received"] = stats.reports_received;
    json peers = json::object();
    for (const auto& [peer_id, entry] : robot.peers.entries()) {
      peers[std::to_string(peer_id)] = {
          {"x_mm", entry.report.x_mm},
          {"y_mm", entry.report.y_mm},
          {"theta_mrad", entry.report.theta_mrad},
          {"seq", entry.report.seq},
          {"localized", entry.report.corner_localized()},
          {"receive_tick", entry.receive_tick},
      };
    }
    summary["peers"] = peers;
    summary["rotation_theta_deg"] = scenario.rotation_theta_deg;

    write_file(dir / "trajectory.csv", robot.trajectory);
    write_file(dir / "events.jsonl", robot.events);
    write_file(dir / "summary.json", summary.dump(2) + "\n");

    result.robots.push_back(stats);
  }

  return result;
}

}  // namespace wallfinder
