#pragma once

#include <vector>

#include "nonstop/so3.hpp"

namespace nonstop {

struct DesiredLoadSample {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  Rotation attitude = Rotation::Identity();
  Vec3 angular_velocity = Vec3::Zero();  // world frame
};

// One piece of a load reference. A hold keeps the current pose; a move
// travels to `target` along a quintic (rest-to-rest) profile.
struct TrajectorySegment {
  enum class Kind { kHold, kMove };
  Kind kind = Kind::kHold;
  double duration = 0.0;
  Vec3 target = Vec3::Zero();

  static TrajectorySegment hold(double duration) { return {Kind::kHold, duration, Vec3::Zero()}; }
  static TrajectorySegment move_to(const Vec3& target, double duration) {
    return {Kind::kMove, duration, target};
  }
  bool operator==(const TrajectorySegment&) const = default;
};

struct TrajectoryPlan {
  Vec3 initial_position = Vec3::Zero();
  Rotation attitude = Rotation::Identity();  // constant attitude reference
  std::vector<TrajectorySegment> segments;

  double duration() const;
};

// Throws kValidation on an empty plan or non-positive durations.
void validate_trajectory(const TrajectoryPlan& plan);

// Minimum-jerk blend s(u) = 10u^3 - 15u^4 + 6u^5 and its first two
// derivatives with respect to u.
struct QuinticBlend {
  double s, ds, dds;
};
QuinticBlend quintic_blend(double u);

DesiredLoadSample sample(const TrajectoryPlan& plan, double t);

// Start and end time of each segment.
struct SegmentWindow {
  double begin, end;
  TrajectorySegment::Kind kind;
};
std::vector<SegmentWindow> segment_windows(const TrajectoryPlan& plan);

}  // namespace nonstop
