#include "wallfinder/kinematics.hpp"

#include <cmath>
#include <string>

namespace wallfinder::kinematics {

double deg_to_rad(double degrees) { return degrees * kPi / 180.0; }

double rad_to_deg(double radians) { return radians * 180.0 / kPi; }

double normalize_angle(double radians) {
  const double r = std::remainder(radians, 2.0 * kPi);
  return r <= -kPi ? r + 2.0 * kPi : r;
}

double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

WheelSpeeds wheel_speeds(const WheelCommand& cmd) {
  if (std::abs(cmd.forward_mm_s) + std::abs(cmd.spin_mm_s) > 500) {
    throw RangeError("wheel command (" + std::to_string(cmd.forward_mm_s) +
                     ", " + std::to_string(cmd.spin_mm_s) +
                     ") exceeds |forward| + |spin| = 500");
  }
  return WheelSpeeds{cmd.forward_mm_s - cmd.spin_mm_s,
                     cmd.forward_mm_s + cmd.spin_mm_s};
}

int encoder_delta(std::int16_t prev, std::int16_t curr) {
  const std::uint16_t d = static_cast<std::uint16_t>(
      static_cast<std::uint16_t>(curr) - static_cast<std::uint16_t>(prev));
  return d < 32768u ? static_cast<int>(d) : static_cast<int>(d) - 65536;
}

double counts_to_mm(int delta, const RobotGeometry& geom) {
  return delta * geom.mm_per_count;
}

Pose integrate_pose(const Pose& pose, double d_left_mm, double d_right_mm,
                    const RobotGeometry& geom) {
  const double dtheta = (d_right_mm - d_left_mm) / geom.wheel_base_mm;
  const double s = 0.5 * (d_left_mm + d_right_mm);
  Pose out = pose;
  if (std::abs(dtheta) < 1e-9) {
    out.x_mm += s * std::cos(pose.theta_rad);
    out.y_mm += s * std::sin(pose.theta_rad);
    out.theta_rad = normalize_angle(pose.theta_rad + dtheta);
  } else {
    const double turn_radius = s / dtheta;
    const double t1 = pose.theta_rad + dtheta;
    out.x_mm += turn_radius * (std::sin(t1) - std::sin(pose.theta_rad));
    out.y_mm += turn_radius * (std::cos(pose.theta_rad) - std::cos(t1));
    out.theta_rad = normalize_angle(t1);
  }
  return out;
}

Vec2 to_world(const FrameTransform& t, const Vec2& p) {
  const double c = std::cos(t.rotation_rad);
  const double s = std::sin(t.rotation_rad);
  return Vec2{p.x * c - p.y * s + t.origin_offset_mm.x,
              p.x * s + p.y * c + t.origin_offset_mm.y};
}

Vec2 corner_estimate_from_center(const Vec2& center_mm, QuadrantSign toward,
                                 double radius_mm) {
  return Vec2{center_mm.x + toward.x * radius_mm,
              center_mm.y + toward.y * radius_mm};
}

}  // namespace wallfinder::kinematics
