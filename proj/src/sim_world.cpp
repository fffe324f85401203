#include "wallfinder/sim_world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wallfinder/errors.hpp"

namespace wallfinder::sim {

namespace {

double clamp_axis(double v, double lo, double hi, int& normal) {
  if (v < lo) {
    normal = -1;
    return lo;
  }
  if (v > hi) {
    normal = 1;
    return hi;
  }
  normal = 0;
  return v;
}

// Distance from a point inside the box to the boundary along direction
// (cos phi, sin phi).
double ray_to_box(double x, double y, double phi, const WorldConfig& world) {
  const double dx = std::cos(phi);
  const double dy = std::sin(phi);
  double t = std::numeric_limits<double>::infinity();
  if (dx > 0.0) {
    t = std::min(t, (world.width_mm - x) / dx);
  } else if (dx < 0.0) {
    t = std::min(t, -x / dx);
  }
  if (dy > 0.0) {
    t = std::min(t, (world.height_mm - y) / dy);
  } else if (dy < 0.0) {
    t = std::min(t, -y / dy);
  }
  return std::max(t, 0.0);
}

// Fold whole counts out of the travel residual into the wrapping register.
void latch_counts(double& residual_mm, std::int16_t& reg, double mm_per_count) {
  const double n = std::floor(residual_mm / mm_per_count);
  residual_mm -= n * mm_per_count;
  const auto wrapped = static_cast<std::uint16_t>(
      static_cast<std::uint16_t>(reg) +
      static_cast<std::uint16_t>(static_cast<std::int64_t>(n)));
  reg = static_cast<std::int16_t>(wrapped);
}

}  // namespace

void SimConfig::validate() const {
  if (!(control_dt_s > 0.0)) {
    throw RangeError("control_dt must be positive");
  }
  if (substeps < 1) {
    throw RangeError("substeps must be at least 1");
  }
  if (slip_model == SlipModel::kSlip &&
      !(slip_factor >= 0.0 && slip_factor <= 1.0)) {
    throw RangeError("slip factor " + std::to_string(slip_factor) +
                     " outside [0, 1]");
  }
}

ContactInfo step(SimRobot& robot, const WorldConfig& world, double dt_s,
                 double slip_factor) {
  if (!(dt_s > 0.0)) {
    throw RangeError("physics dt must be positive");
  }
  const auto& geom = robot.geometry;
  const double cmd_right = robot.right_mm_s * dt_s;
  const double cmd_left = robot.left_mm_s * dt_s;

  const kinematics::Pose before = robot.true_pose;
  const kinematics::Pose proposed =
      kinematics::integrate_pose(before, cmd_left, cmd_right, geom);

  int nx = 0;
  int ny = 0;
  kinematics::Pose after = proposed;
  after.x_mm = clamp_axis(proposed.x_mm, geom.radius_mm,
                          world.width_mm - geom.radius_mm, nx);
  after.y_mm = clamp_axis(proposed.y_mm, geom.radius_mm,
                          world.height_mm - geom.radius_mm, ny);

  ContactInfo contact;
  contact.in_contact = nx != 0 || ny != 0;
  if (contact.in_contact) {
    contact.bearing_rad = kinematics::normalize_angle(
        std::atan2(static_cast<double>(ny), static_cast<double>(nx)) -
        before.theta_rad);
  }

  // Achieved forward travel is the displacement that survived the clamp,
  // projected on the heading. Rotation always goes through.
  const double dtheta = (cmd_right - cmd_left) / geom.wheel_base_mm;
  const double achieved = (after.x_mm - before.x_mm) * std::cos(before.theta_rad) +
                          (after.y_mm - before.y_mm) * std::sin(before.theta_rad);
  const double ach_right = achieved + 0.5 * geom.wheel_base_mm * dtheta;
  const double ach_left = achieved - 0.5 * geom.wheel_base_mm * dtheta;

  robot.right_residual_mm += ach_right + slip_factor * (cmd_right - ach_right);
  robot.left_residual_mm += ach_left + slip_factor * (cmd_left - ach_left);
  latch_counts(robot.right_residual_mm, robot.right_register,
               geom.mm_per_count);
  latch_counts(robot.left_residual_mm, robot.left_register,
               geom.mm_per_count);
  robot.true_pose = after;
  robot.last_contact = contact;
  return contact;
}

ContactInfo step_control_tick(SimRobot& robot, const WorldConfig& world,
                              const SimConfig& cfg) {
  const double dt = cfg.physics_dt_s();
  const double slip = cfg.effective_slip();
  ContactInfo contact = robot.last_contact;
  for (int i = 0; i < cfg.substeps; ++i) {
    contact = step(robot, world, dt, slip);
  }
  return contact;
}

oi::BumpState sense_bumps(const ContactInfo& contact,
                          double front_half_angle_rad) {
  oi::BumpState bumps;
  if (!contact.in_contact) {
    return bumps;
  }
  const double b = contact.bearing_rad;
  if (std::abs(b) > kinematics::kPi / 2.0) {
    return bumps;
  }
  if (std::abs(b) <= front_half_angle_rad) {
    bumps.bump_left = true;
    bumps.bump_right = true;
  } else if (b > 0.0) {
    bumps.bump_left = true;
  } else {
    bumps.bump_right = true;
  }
  return bumps;
}

oi::EncoderCounts sense_encoders(const SimRobot& robot) {
  return oi::EncoderCounts{robot.left_register, robot.right_register};
}

LightBumperReading sense_light_bumpers(const SimRobot& robot,
                                       const WorldConfig& world,
                                       double range_mm) {
  LightBumperReading reading;
  std::uint8_t bits = 0;
  for (std::size_t i = 0; i < kLightRayBearingsDeg.size(); ++i) {
    const double phi = robot.true_pose.theta_rad +
                       kinematics::deg_to_rad(kLightRayBearingsDeg[i]);
    const double t =
        ray_to_box(robot.true_pose.x_mm, robot.true_pose.y_mm, phi, world);
    const double d = std::max(0.0, t - robot.geometry.radius_mm);
    const double intensity = std::max(0.0, 1.0 - d / range_mm);
    const auto signal =
        static_cast<std::uint16_t>(std::lround(4095.0 * intensity));
    reading.signals[i] = signal;
    if (signal > 0) {
      bits |= static_cast<std::uint8_t>(1u << i);
    }
  }
  reading.bits = oi::LightBumperBits{bits};
  return reading;
}

}  // namespace wallfinder::sim
