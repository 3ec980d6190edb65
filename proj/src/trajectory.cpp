#include "nonstop/trajectory.hpp"

#include <algorithm>
#include <string>

#include "nonstop/error.hpp"

namespace nonstop {

double TrajectoryPlan::duration() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration;
  return total;
}

void validate_trajectory(const TrajectoryPlan& plan) {
  if (plan.segments.empty()) throw Error(ErrorCode::kValidation, "trajectory: no segments");
  for (std::size_t i = 0; i < plan.segments.size(); ++i) {
    if (!(plan.segments[i].duration > 0.0)) {
      throw Error(ErrorCode::kValidation,
                  "trajectory: segment " + std::to_string(i) + " duration must be positive");
    }
    if (!plan.segments[i].target.allFinite()) {
      throw Error(ErrorCode::kValidation, "trajectory: segment " + std::to_string(i) + " target not finite");
    }
  }
  if (!is_rotation(plan.attitude)) {
    throw Error(ErrorCode::kValidation, "trajectory: attitude is not a rotation");
  }
}

QuinticBlend quintic_blend(double u) {
  u = std::clamp(u, 0.0, 1.0);
  const double u2 = u * u;
  const double u3 = u2 * u;
  return {u3 * (10.0 - 15.0 * u + 6.0 * u2),
          30.0 * u2 * (1.0 - 2.0 * u + u2),
          60.0 * u * (1.0 - 3.0 * u + 2.0 * u2)};
}

std::vector<SegmentWindow> segment_windows(const TrajectoryPlan& plan) {
  std::vector<SegmentWindow> out;
  double t0 = 0.0;
  for (const auto& s : plan.segments) {
    out.push_back({t0, t0 + s.duration, s.kind});
    t0 += s.duration;
  }
  return out;
}

DesiredLoadSample sample(const TrajectoryPlan& plan, double t) {
  if (plan.segments.empty()) throw Error(ErrorCode::kInvalidArgument, "sample: empty trajectory");
  if (t < 0.0) throw Error(ErrorCode::kInvalidArgument, "sample: negative time");
  DesiredLoadSample out;
  out.attitude = plan.attitude;
  Vec3 start = plan.initial_position;
  double t0 = 0.0;
  for (const auto& seg : plan.segments) {
    const double t1 = t0 + seg.duration;
    const Vec3 end = seg.kind == TrajectorySegment::Kind::kMove ? seg.target : start;
    if (t < t1) {
      if (seg.kind == TrajectorySegment::Kind::kHold) {
        out.position = start;
        return out;
      }
      const auto b = quintic_blend((t - t0) / seg.duration);
      const Vec3 delta = end - start;
      out.position = start + b.s * delta;
      out.velocity = (b.ds / seg.duration) * delta;
      out.acceleration = (b.dds / (seg.duration * seg.duration)) * delta;
      return out;
    }
    start = end;
    t0 = t1;
  }
  out.position = start;
  return out;
}

}  // namespace nonstop
