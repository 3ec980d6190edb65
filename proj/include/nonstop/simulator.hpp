#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nonstop/error.hpp"
#include "nonstop/feasibility.hpp"
#include "nonstop/scenario.hpp"

namespace nonstop {

struct CableForce {
  Vec3 force;      // on the load [N]
  double tension;  // [N]
};

// Spring-damper cable between attachment i and a carrier. Stretch and
// stretch rate are taken along the cable; a unilateral cable never pushes.
CableForce cable_force_on_load(const Vec3& carrier_pos, const Vec3& carrier_vel,
                               const LoadState& load, const SystemGeometry& geom,
                               const CableParams& params, int i);

struct LoadDamping {
  double linear = 0.7;   // [N s/m]
  double angular = 0.7;  // [N m s]
};

// Load acceleration (world) and angular acceleration (body) under the given
// cable forces.
struct LoadRates {
  Vec3 acceleration;
  Vec3 angular_acceleration;
};
LoadRates load_dynamics(const LoadState& load, const std::vector<Vec3>& forces,
                        const SystemGeometry& geom, const LoadDamping& damping);

// One RK4 step with the cable forces held constant. Attitude is advanced on
// SO(3) through a local rotation vector (Munthe-Kaas form), so R stays a
// rotation at any dt. Requires dt in (0, 0.01].
LoadState load_step(const LoadState& load, const std::vector<Vec3>& forces,
                    const SystemGeometry& geom, const LoadDamping& damping, double dt);

// Single-carrier target: the position moves linearly with `velocity`
// from `position` at the start of the step (first-order hold).
struct CarrierTarget {
  Vec3 position;
  Vec3 velocity;
};

struct PointMass {
  Vec3 position;
  Vec3 velocity;
};

// m v_dot = Kp (p_d - p) + Kd (v_d - v) - reaction, gravity compensated.
// `reaction` is the cable force applied to the load (T q); the carrier feels
// its opposite. Kinematic mode snaps to the target at the end of the step.
PointMass carrier_step(const PointMass& carrier, const CarrierTarget& target,
                       const Vec3& reaction, const CarrierModel& model, double mass, double dt);

struct TraceRecord {
  double t = 0.0;
  LoadState load;
  DesiredLoadSample reference;
  std::vector<Vec3> carrier_position;
  std::vector<Vec3> carrier_velocity;
  std::vector<Vec3> desired_position;
  std::vector<Vec3> desired_velocity;    // commanded carrier velocity
  std::vector<Vec3> predicted_velocity;  // velocity-floor prediction
  std::vector<double> tension;           // realized
  std::vector<double> desired_tension;
  std::vector<double> margin;            // ||predicted|| - epsilon
  Vec3 position_error = Vec3::Zero();
  Vec3 attitude_error = Vec3::Zero();
  Vec6 wrench = Vec6::Zero();
  Oscillation x;
  bool optimizer_ran = false;
  bool optimizer_feasible = true;
  bool fallback_used = false;
};

struct SimTrace {
  int carriers = 0;
  double sample_period = 0.0;
  double epsilon = 0.0;
  std::vector<TraceRecord> records;
  bool aborted = false;
  std::optional<ErrorCode> abort_code;
  std::string abort_reason;
  int optimizer_runs = 0;
  int fallback_count = 0;
};

// Fixed-step closed loop: reference, wrench PID, allocation with a
// continuous nullspace basis, internal-force optimization on its schedule,
// carrier targets, then physics substeps until the next control tick.
// Module errors stop the run; the trace up to the failure is returned with
// `aborted` set.
SimTrace run_closed_loop(const ScenarioConfig& config);

}  // namespace nonstop
