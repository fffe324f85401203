#pragma once

#include <array>
#include <cstdint>

#include "wallfinder/kinematics.hpp"
#include "wallfinder/oi_protocol.hpp"
#include "wallfinder/world.hpp"

namespace wallfinder::sim {

inline constexpr double kDefaultFrontHalfAngleRad =
    10.0 * kinematics::kPi / 180.0;
inline constexpr double kDefaultLightRangeMm = 150.0;

enum class SlipModel { kStall, kSlip };

struct SimConfig {
  double control_dt_s = 0.015;
  int substeps = 15;
  SlipModel slip_model = SlipModel::kStall;
  double slip_factor = 0.0;  // only consulted when slip_model == kSlip
  std::uint64_t seed = 0;

  void validate() const;
  double physics_dt_s() const { return control_dt_s / substeps; }
  double effective_slip() const {
    return slip_model == SlipModel::kStall ? 0.0 : slip_factor;
  }
};

// Wall contact as seen from the robot. Bearing is the direction of the
// touched wall relative to the heading, positive toward the robot's left.
struct ContactInfo {
  bool in_contact = false;
  double bearing_rad = 0.0;
};

struct SimRobot {
  kinematics::Pose true_pose;
  kinematics::RobotGeometry geometry;
  int right_mm_s = 0;
  int left_mm_s = 0;
  // Wheel travel waiting to be quantized into whole encoder counts.
  double right_residual_mm = 0.0;
  double left_residual_mm = 0.0;
  std::int16_t right_register = 0;
  std::int16_t left_register = 0;
  ContactInfo last_contact;
};

// Advances one physics substep: exact-arc motion from the commanded wheel
// speeds, then an axis-aligned clamp to the wall box. Rotation is never
// blocked. Returns the contact state after the clamp (also stored on the
// robot).
ContactInfo step(SimRobot& robot, const WorldConfig& world, double dt_s,
                 double slip_factor = 0.0);

// Runs a full control tick worth of substeps.
ContactInfo step_control_tick(SimRobot& robot, const WorldConfig& world,
                              const SimConfig& cfg);

oi::BumpState sense_bumps(const ContactInfo& contact,
                          double front_half_angle_rad = kDefaultFrontHalfAngleRad);

oi::EncoderCounts sense_encoders(const SimRobot& robot);

struct LightBumperReading {
  // Index 0..5 follows the bit order of the bumper bit field: left,
  // front-left, center-left, center-right, front-right, right.
  std::array<std::uint16_t, 6> signals{};
  oi::LightBumperBits bits{};
};

// Ray bearings for each light bump sensor, robot frame, matching the
// LightBumperReading index order.
inline constexpr std::array<double, 6> kLightRayBearingsDeg = {
    60.0, 30.0, 10.0, -10.0, -30.0, -60.0};

LightBumperReading sense_light_bumpers(const SimRobot& robot,
                                       const WorldConfig& world,
                                       double range_mm = kDefaultLightRangeMm);

}  // namespace wallfinder::sim
