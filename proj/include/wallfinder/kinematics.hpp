#pragma once

#include <cstdint>
#include <numbers>

#include "wallfinder/errors.hpp"

// Differential-drive motion math: wheel mixing, encoder deltas with
// rollover, dead-reckoning integration, and planar frame transforms.
namespace wallfinder::kinematics {

inline constexpr double kPi = std::numbers::pi;

// 72 mm wheels, 508.8 counts per wheel revolution.
inline constexpr double kDefaultMmPerCount = kPi * 72.0 / 508.8;

double deg_to_rad(double degrees);
double rad_to_deg(double radians);

// Maps any angle into (-pi, pi].
double normalize_angle(double radians);

struct Pose {
  double x_mm = 0.0;
  double y_mm = 0.0;
  double theta_rad = 0.0;  // counterclockwise positive, 0 = +x
  bool operator==(const Pose&) const = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

double distance(const Vec2& a, const Vec2& b);

struct RobotGeometry {
  double radius_mm = 117.5;
  double wheel_base_mm = 235.0;
  double mm_per_count = kDefaultMmPerCount;
};

// The Move-command parameterization: a common forward speed plus a
// differential spin term, positive spin = clockwise.
struct WheelCommand {
  int forward_mm_s = 0;
  int spin_mm_s = 0;
  bool operator==(const WheelCommand&) const = default;
};

struct WheelSpeeds {
  int right_mm_s = 0;
  int left_mm_s = 0;
  bool operator==(const WheelSpeeds&) const = default;
};

// right = forward - spin, left = forward + spin.
// Throws RangeError when |forward| + |spin| > 500.
WheelSpeeds wheel_speeds(const WheelCommand& cmd);

// Signed count change between two register reads, resolved through the
// 16-bit rollover: the unique d in [-32768, 32767] with
// (prev + d) mod 2^16 == curr mod 2^16.
int encoder_delta(std::int16_t prev, std::int16_t curr);

double counts_to_mm(int delta, const RobotGeometry& geom = {});

// Dead-reckoning update for one sample interval. Equal wheel travel is a
// straight line; otherwise an exact constant-curvature arc with the chord
// update. The straight-line branch engages below |dtheta| = 1e-9 to avoid
// the divide at zero curvature.
Pose integrate_pose(const Pose& pose, double d_left_mm, double d_right_mm,
                    const RobotGeometry& geom = {});

struct FrameTransform {
  double rotation_rad = 0.0;
  Vec2 origin_offset_mm{};
};

// Rotates a body-frame point counterclockwise by rotation_rad, then
// translates by origin_offset_mm.
Vec2 to_world(const FrameTransform& t, const Vec2& body_point);

// Per-axis direction toward a corner; each component is +1 or -1.
struct QuadrantSign {
  int x = 1;
  int y = 1;
  bool operator==(const QuadrantSign&) const = default;
};

// Pushes a center position outward by one robot radius along each axis
// toward the corner.
Vec2 corner_estimate_from_center(const Vec2& center_mm, QuadrantSign toward,
                                 double radius_mm);

}  // namespace wallfinder::kinematics
