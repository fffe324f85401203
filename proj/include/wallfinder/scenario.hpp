#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wallfinder/controller.hpp"
#include "wallfinder/kinematics.hpp"
#include "wallfinder/sim_world.hpp"
#include "wallfinder/swarm.hpp"
#include "wallfinder/world.hpp"

namespace wallfinder {

struct RobotSpec {
  std::uint8_t id = 0;
  kinematics::Vec2 start_mm{0.0, 0.0};
  double heading_deg = 0.0;
  control::ControllerParams controller;
};

struct Scenario {
  WorldConfig world;
  kinematics::RobotGeometry geometry;
  std::vector<RobotSpec> robots;
  sim::SimConfig sim;
  swarm::BusConfig bus;
  bool bus_seed_explicit = false;
  double duration_s = 60.0;
  double rotation_theta_deg = 0.0;
  double report_period_s = 1.0;
  bool stream_light_bumpers = false;

  // Re-derives per-run randomness (bus stream included, unless the file
  // pinned a bus seed) from a new top-level seed.
  void reseed(std::uint64_t seed);

  void validate() const;
};

// Both throw ScenarioError on malformed input.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace wallfinder
