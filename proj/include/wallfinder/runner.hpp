#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "wallfinder/scenario.hpp"

namespace wallfinder {

struct RobotRunStats {
  std::uint8_t id = 0;
  kinematics::Pose true_pose;
  // Controller estimate in its final frame: start-relative until a corner
  // snap, room-absolute afterwards.
  kinematics::Pose estimate;
  bool localized = false;
  std::optional<control::CornerId> corner;
  std::optional<kinematics::Vec2> corner_estimate_mm;  // start-relative
  std::optional<kinematics::Vec2> true_corner_mm;      // start-relative
  std::optional<double> corner_error_mm;
  std::optional<std::uint64_t> localized_tick;
  double position_error_mm = 0.0;
  std::uint64_t bump_edges = 0;
  std::uint64_t hits_recorded = 0;
  std::uint64_t reports_sent = 0;
  std::uint64_t reports_received = 0;
  std::size_t peers_known = 0;
};

struct RunResult {
  std::uint64_t rows_per_robot = 0;
  std::vector<RobotRunStats> robots;
  std::filesystem::path out_dir;
};

// Runs the scenario tick by tick and writes trajectory.csv, events.jsonl and
// summary.json into out_dir/robot_<id>/ for every robot. Sensor values and
// wheel commands pass through their wire encodings each tick, so the run
// exercises the same codec paths a serial link would.
// Throws IoError when an output cannot be written.
RunResult run_scenario(const Scenario& scenario,
                       const std::filesystem::path& out_dir);

}  // namespace wallfinder
