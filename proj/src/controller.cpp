#include "wallfinder/controller.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "wallfinder/errors.hpp"

namespace wallfinder::control {

namespace {

constexpr int kBackwardSpeedMmS = -100;

BumpClass class_from_low_bits(unsigned bits) {
  switch (bits & 0x3u) {
    case 1u:
      return BumpClass::kRight;
    case 2u:
      return BumpClass::kLeft;
    case 3u:
      return BumpClass::kBoth;
    default:
      return BumpClass::kNone;
  }
}

}  // namespace

const char* bump_class_name(BumpClass c) {
  switch (c) {
    case BumpClass::kNone:
      return "none";
    case BumpClass::kRight:
      return "right";
    case BumpClass::kLeft:
      return "left";
    case BumpClass::kBoth:
      return "both";
  }
  return "?";
}

BumpClass classify_bump(oi::BumpByte byte) {
  return class_from_low_bits(byte.value % 4u);
}

BumpClass classify_bump(const oi::BumpState& bumps) {
  const unsigned bits = (bumps.bump_left ? 2u : 0u) | (bumps.bump_right ? 1u : 0u);
  return class_from_low_bits(bits);
}

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::kBackward:
      return "backward";
    case Phase::kSpin:
      return "spin";
    case Phase::kDrive:
      return "drive";
  }
  return "?";
}

const char* corner_name(CornerId c) {
  switch (c) {
    case CornerId::kBottomLeft:
      return "bottom_left";
    case CornerId::kBottomRight:
      return "bottom_right";
    case CornerId::kTopLeft:
      return "top_left";
    case CornerId::kTopRight:
      return "top_right";
  }
  return "?";
}

void ControllerParams::validate() const {
  if (move_speed_mm_s <= 0 || spin_speed_base_mm_s <= 0 ||
      spin_time_s <= 0.0 || back_time_s <= 0.0 || corner_window < 1 ||
      corner_proximity_mm <= 0.0) {
    throw RangeError("controller params must all be positive");
  }
  if (spin_speed_base_mm_s < 50) {
    throw RangeError("spin_speed_base below 50 would allow a negative spin "
                     "magnitude draw");
  }
  if (move_speed_mm_s + spin_speed_base_mm_s + 50 > 500) {
    throw RangeError(
        "move_speed + spin_speed_base + 50 exceeds the 500 mm/s wheel "
        "command budget");
  }
}

bool detect_corner(std::span<const HitRecord> hits,
                   const ControllerParams& params) {
  const auto window = static_cast<std::size_t>(params.corner_window);
  if (hits.size() < window) {
    return false;
  }
  const auto last = hits.subspan(hits.size() - window);
  for (std::size_t i = 0; i < last.size(); ++i) {
    if (last[i].side != BumpClass::kLeft && last[i].side != BumpClass::kRight) {
      return false;
    }
    if (i > 0 && last[i].side == last[i - 1].side) {
      return false;
    }
  }
  for (std::size_t i = 0; i < last.size(); ++i) {
    for (std::size_t j = i + 1; j < last.size(); ++j) {
      const kinematics::Vec2 a{last[i].pose_at_hit.x_mm,
                               last[i].pose_at_hit.y_mm};
      const kinematics::Vec2 b{last[j].pose_at_hit.x_mm,
                               last[j].pose_at_hit.y_mm};
      if (kinematics::distance(a, b) > params.corner_proximity_mm) {
        return false;
      }
    }
  }
  return true;
}

CornerId identify_corner(double net_dx_mm, double net_dy_mm) {
  const bool right = net_dx_mm >= 0.0;
  const bool top = net_dy_mm >= 0.0;
  if (right && top) {
    return CornerId::kTopRight;
  }
  if (!right && top) {
    return CornerId::kTopLeft;
  }
  if (right) {
    return CornerId::kBottomRight;
  }
  return CornerId::kBottomLeft;
}

kinematics::QuadrantSign quadrant_sign(CornerId corner) {
  switch (corner) {
    case CornerId::kBottomLeft:
      return {-1, -1};
    case CornerId::kBottomRight:
      return {1, -1};
    case CornerId::kTopLeft:
      return {-1, 1};
    case CornerId::kTopRight:
      return {1, 1};
  }
  return {1, 1};
}

kinematics::Vec2 corner_world_position(CornerId corner,
                                       const WorldConfig& world) {
  const auto q = quadrant_sign(corner);
  return {q.x > 0 ? world.width_mm : 0.0, q.y > 0 ? world.height_mm : 0.0};
}

kinematics::Vec2 corner_snap_position(CornerId corner,
                                      const WorldConfig& world,
                                      const kinematics::RobotGeometry& geom) {
  const auto q = quadrant_sign(corner);
  const auto c = corner_world_position(corner, world);
  return {c.x - q.x * geom.radius_mm, c.y - q.y * geom.radius_mm};
}

WallFinder::WallFinder(const ControllerParams& params,
                       const kinematics::RobotGeometry& geom,
                       const WorldConfig& world, double start_heading_rad,
                       std::uint64_t seed)
    : params_(params),
      geom_(geom),
      world_(world),
      rng_(seed),
      estimate_{0.0, 0.0, kinematics::normalize_angle(start_heading_rad)} {
  params_.validate();
  world_.validate(geom_.radius_mm);
}

void WallFinder::on_bump(BumpClass side, double now_s, TickResult& result) {
  move_helper_s_ = now_s;
  move_val_ = kBackwardSpeedMmS;

  const int lo = params_.spin_speed_base_mm_s - 50;
  const int hi = params_.spin_speed_base_mm_s + 50;
  if (side == BumpClass::kBoth) {
    const auto coin = rng_.uniform_int(0, 1);
    const auto magnitude = static_cast<int>(rng_.uniform_int(lo, hi));
    spin_val_ = coin == 0 ? -magnitude : magnitude;
  } else {
    const auto magnitude = static_cast<int>(rng_.uniform_int(lo, hi));
    spin_val_ = side == BumpClass::kLeft ? magnitude : -magnitude;
  }
  forward_spin_ = -spin_val_;

  if (side == BumpClass::kBoth) {
    return;
  }

  HitRecord hit{side, estimate_, now_s};
  hits_.push_back(hit);
  const auto cap = std::max<std::size_t>(
      static_cast<std::size_t>(params_.corner_window), 16);
  if (hits_.size() > cap) {
    hits_.erase(hits_.begin(),
                hits_.begin() + static_cast<std::ptrdiff_t>(hits_.size() - cap));
  }
  result.new_hit = hit;

  if (!armed_ || !detect_corner(hits_, params_)) {
    return;
  }

  const kinematics::Vec2 net{estimate_.x_mm - origin_mm_.x,
                             estimate_.y_mm - origin_mm_.y};
  const CornerId corner = identify_corner(net.x, net.y);
  const auto q = quadrant_sign(corner);
  corner_ = corner;
  result.corner_detected = true;
  result.corner = corner;
  result.corner_estimate_mm =
      kinematics::corner_estimate_from_center(net, q, geom_.radius_mm);

  const auto snap = corner_snap_position(corner, world_, geom_);
  origin_mm_.x += snap.x - estimate_.x_mm;
  origin_mm_.y += snap.y - estimate_.y_mm;
  estimate_.x_mm = snap.x;
  estimate_.y_mm = snap.y;
  localized_ = true;
  result.localized_now = true;
  hits_.clear();
  if (params_.relocalize == RelocalizePolicy::kOnce) {
    armed_ = false;
  }
}

TickResult WallFinder::tick(double now_s, const oi::BumpState& bumps,
                            const oi::EncoderCounts& counts) {
  TickResult result;

  if (!timers_started_) {
    // Start mid-maneuver so the first command is the forward drive.
    move_helper_s_ = now_s - (params_.back_time_s + params_.spin_time_s);
    timers_started_ = true;
  }

  if (have_prev_counts_) {
    const double d_left = kinematics::counts_to_mm(
        kinematics::encoder_delta(prev_counts_.left, counts.left), geom_);
    const double d_right = kinematics::counts_to_mm(
        kinematics::encoder_delta(prev_counts_.right, counts.right), geom_);
    estimate_ = kinematics::integrate_pose(estimate_, d_left, d_right, geom_);
  }
  prev_counts_ = counts;
  have_prev_counts_ = true;

  const BumpClass cls = classify_bump(bumps);
  result.bump = cls;
  result.bump_edge = prev_class_ == BumpClass::kNone && cls != BumpClass::kNone;
  prev_class_ = cls;
  if (result.bump_edge) {
    on_bump(cls, now_s, result);
  }

  const double t = now_s - move_helper_s_;
  Phase phase;
  if (t < params_.back_time_s) {
    phase = Phase::kBackward;
    result.command = {move_val_, 0};
  } else if (t < params_.back_time_s + params_.spin_time_s) {
    phase = Phase::kSpin;
    result.command = {0, spin_val_};
  } else {
    phase = Phase::kDrive;
    result.command = {params_.move_speed_mm_s, forward_spin_};
  }
  result.phase = phase;
  result.phase_changed = phase != phase_;
  phase_ = phase;
  return result;
}

}  // namespace wallfinder::control
