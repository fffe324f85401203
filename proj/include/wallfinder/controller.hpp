#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wallfinder/kinematics.hpp"
#include "wallfinder/oi_protocol.hpp"
#include "wallfinder/rng.hpp"
#include "wallfinder/world.hpp"

namespace wallfinder::control {

enum class BumpClass { kNone, kRight, kLeft, kBoth };

const char* bump_class_name(BumpClass c);

// Low two bits of the bumper byte; wheel-drop bits fall away under mod 4.
BumpClass classify_bump(oi::BumpByte byte);
BumpClass classify_bump(const oi::BumpState& bumps);

enum class Phase { kBackward, kSpin, kDrive };

const char* phase_name(Phase p);

enum class CornerId { kBottomLeft, kBottomRight, kTopLeft, kTopRight };

const char* corner_name(CornerId c);

enum class RelocalizePolicy { kOnce, kAlways };

struct ControllerParams {
  int move_speed_mm_s = 100;
  int spin_speed_base_mm_s = 100;
  double spin_time_s = 0.75;
  double back_time_s = 0.25;
  int corner_window = 4;
  double corner_proximity_mm = 150.0;
  RelocalizePolicy relocalize = RelocalizePolicy::kOnce;

  void validate() const;
};

struct HitRecord {
  BumpClass side = BumpClass::kNone;  // kRight or kLeft
  kinematics::Pose pose_at_hit;
  double time_s = 0.0;
};

// True when the last corner_window hits strictly alternate left/right and
// every pair of hit positions lies within corner_proximity of each other.
bool detect_corner(std::span<const HitRecord> hits,
                   const ControllerParams& params);

// Which corner the robot reached, by the sign of its net displacement from
// the start. Zero components count as positive.
CornerId identify_corner(double net_dx_mm, double net_dy_mm);

// Unit signs of the corner's quadrant: TopRight -> (+1, +1) and so on.
kinematics::QuadrantSign quadrant_sign(CornerId corner);

kinematics::Vec2 corner_world_position(CornerId corner,
                                       const WorldConfig& world);

// Where the robot's center sits when wedged into the corner: the corner
// point pulled inward by (radius, radius).
kinematics::Vec2 corner_snap_position(CornerId corner,
                                      const WorldConfig& world,
                                      const kinematics::RobotGeometry& geom);

struct TickResult {
  kinematics::WheelCommand command;
  Phase phase = Phase::kDrive;
  bool phase_changed = false;
  BumpClass bump = BumpClass::kNone;
  bool bump_edge = false;
  std::optional<HitRecord> new_hit;
  bool corner_detected = false;
  std::optional<CornerId> corner;
  // Start-relative estimate of the corner point, valid when corner_detected.
  kinematics::Vec2 corner_estimate_mm;
  bool localized_now = false;
};

// Bump-and-bounce wall finder. Dead-reckons from encoder counts in a frame
// that starts at the robot's start position with axes parallel to the room
// walls (heading at start is assumed known). Once a corner is identified the
// estimate snaps to the corner's room coordinates and stays room-absolute.
class WallFinder {
 public:
  WallFinder(const ControllerParams& params,
             const kinematics::RobotGeometry& geom, const WorldConfig& world,
             double start_heading_rad, std::uint64_t seed);

  // One control cycle: fold in encoder deltas, debounce the bumper, run the
  // bump reaction and corner logic, and emit the wheel command for this
  // phase of the maneuver.
  TickResult tick(double now_s, const oi::BumpState& bumps,
                  const oi::EncoderCounts& counts);

  const kinematics::Pose& estimate() const { return estimate_; }
  Phase phase() const { return phase_; }
  bool localized() const { return localized_; }
  int spin_val() const { return spin_val_; }
  int forward_spin() const { return forward_spin_; }
  const std::vector<HitRecord>& hits() const { return hits_; }
  std::optional<CornerId> identified_corner() const { return corner_; }
  // Believed start position in the estimate's current frame. (0,0) until a
  // snap re-bases the frame onto the room.
  kinematics::Vec2 start_belief_mm() const { return origin_mm_; }
  const ControllerParams& params() const { return params_; }

 private:
  void on_bump(BumpClass side, double now_s, TickResult& result);

  ControllerParams params_;
  kinematics::RobotGeometry geom_;
  WorldConfig world_;
  Rng rng_;

  kinematics::Pose estimate_;
  kinematics::Vec2 origin_mm_{0.0, 0.0};
  bool have_prev_counts_ = false;
  oi::EncoderCounts prev_counts_{};

  Phase phase_ = Phase::kDrive;
  BumpClass prev_class_ = BumpClass::kNone;
  int spin_val_ = 0;
  int forward_spin_ = 0;
  int move_val_ = -100;
  double move_helper_s_ = 0.0;
  bool timers_started_ = false;

  std::vector<HitRecord> hits_;
  bool armed_ = true;
  bool localized_ = false;
  std::optional<CornerId> corner_;
};

}  // namespace wallfinder::control
