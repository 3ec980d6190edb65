#include "nonstop/scenario.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "nonstop/error.hpp"

namespace nonstop {

namespace {

constexpr int kDefaultCarriers = 4;
constexpr double kDefaultAttachmentRadius = 0.3;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kValidation, what);
}

bool nonneg(const Vec3& v) { return v.allFinite() && (v.array() >= 0.0).all(); }

}  // namespace

TrajectoryPlan default_trajectory() {
  TrajectoryPlan plan;
  plan.initial_position = Vec3::Zero();
  plan.segments = {TrajectorySegment::hold(5.0),
                   TrajectorySegment::move_to(Vec3(1.5, 0.0, 0.0), 10.0),
                   TrajectorySegment::hold(10.0)};
  return plan;
}

ScenarioConfig::ScenarioConfig()
    : geometry(make_polygon_geometry(kDefaultCarriers, kDefaultAttachmentRadius, 0.8, 1.0,
                                     0.01 * Mat3::Identity(), 0.01)),
      trajectory(default_trajectory()) {}

bool operator==(const SystemGeometry& a, const SystemGeometry& b) {
  return a.attachments == b.attachments && a.cable_lengths == b.cable_lengths &&
         a.load_mass == b.load_mass && a.load_inertia == b.load_inertia &&
         a.carrier_masses == b.carrier_masses && a.gravity == b.gravity;
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return a.name == b.name && a.geometry == b.geometry && a.load_damping == b.load_damping &&
         a.load_angular_damping == b.load_angular_damping && a.cable == b.cable &&
         a.carrier == b.carrier && a.gains == b.gains &&
         a.position_integral_limit == b.position_integral_limit &&
         a.attitude_integral_limit == b.attitude_integral_limit &&
         a.tension_floor == b.tension_floor && a.stretch_compensation == b.stretch_compensation &&
         a.epsilon == b.epsilon && a.optimizer == b.optimizer &&
         a.trajectory.initial_position == b.trajectory.initial_position &&
         a.trajectory.attitude == b.trajectory.attitude &&
         a.trajectory.segments == b.trajectory.segments && a.timing == b.timing &&
         a.output == b.output;
}

void validate(const ScenarioConfig& c) {
  validate_geometry(c.geometry);
  for (double l : c.geometry.cable_lengths) {
    require(l == c.cable.rest_length, "geometry: cable lengths must equal cable.rest_length");
  }
  require(c.cable.rest_length > 0.0, "cable.rest_length must be positive");
  require(c.cable.stiffness > 0.0, "cable.stiffness must be positive");
  require(c.cable.damping >= 0.0, "cable.damping must be nonnegative");
  require(c.carrier.kp >= 0.0 && c.carrier.kd >= 0.0, "carrier gains must be nonnegative");
  require(c.load_damping >= 0.0 && c.load_angular_damping >= 0.0,
          "load damping must be nonnegative");
  const auto& g = c.gains;
  require(nonneg(g.kp) && nonneg(g.kv) && nonneg(g.ki) && nonneg(g.kr) && nonneg(g.kw) &&
              nonneg(g.kir),
          "controller gains must be nonnegative");
  require(c.position_integral_limit >= 0.0 && c.attitude_integral_limit >= 0.0,
          "controller integral limits must be nonnegative");
  require(c.tension_floor > 0.0, "controller.tension_floor must be positive");
  require(c.epsilon > 0.0, "epsilon must be positive");

  const auto& o = c.optimizer;
  const auto& b = o.bounds;
  require(b.frequency_min >= 0.0 && b.frequency_min <= b.frequency_max,
          "optimizer frequency bounds must satisfy 0 <= min <= max");
  require(b.amplitude_min >= 0.0 && b.amplitude_min <= b.amplitude_max,
          "optimizer amplitude bounds must satisfy 0 <= min <= max");
  require(o.initial.frequency >= 0.0 && o.initial.amplitude >= 0.0,
          "optimizer initial frequency and amplitude must be nonnegative");
  require(!o.enabled || b.contains(o.initial), "optimizer initial point must lie within the bounds");
  require(o.weights.position >= 0.0 && o.weights.velocity >= 0.0,
          "optimizer weights must be nonnegative");
  require(o.settings.grid >= 2, "optimizer.grid must be at least 2");
  require(o.settings.polish_iterations >= 0, "optimizer.polish_iterations must be nonnegative");
  require(o.settings.lookahead_samples >= 0, "optimizer.lookahead must be nonnegative");
  require(o.period >= c.timing.control_period * (1.0 - 1e-12),
          "optimizer.period must be at least the control period");

  const int n = c.geometry.count();
  const int nullity = 3 * n - 6;
  std::set<int> seen;
  for (int col : o.columns) {
    require(col >= 0 && col < nullity,
            "optimizer.columns entries must lie in [0, " + std::to_string(nullity) + ")");
    require(seen.insert(col).second, "optimizer.columns entries must be distinct");
  }
  const int used = o.columns.empty() ? nullity : static_cast<int>(o.columns.size());
  if (!o.phases.empty()) {
    require(static_cast<int>(o.phases.size()) == used,
            "optimizer.phases must have one entry per nullspace direction in use (" +
                std::to_string(used) + ")");
    for (double p : o.phases) {
      require(p >= -std::numbers::pi && p < std::numbers::pi, "optimizer.phases entries must lie in [-pi, pi)");
    }
  }

  validate_trajectory(c.trajectory);
  const auto& t = c.timing;
  require(t.physics_dt > 0.0 && t.physics_dt <= 0.01, "timing.physics_dt must lie in (0, 0.01]");
  require(t.control_period >= t.physics_dt, "timing.control_period must be at least physics_dt");
  const double ratio = t.control_period / t.physics_dt;
  require(std::abs(ratio - std::round(ratio)) < 1e-9 * ratio,
          "timing.control_period must be an integer multiple of physics_dt");
  require(t.duration > 0.0, "timing.duration must be positive");
}

double command_compliance(const ScenarioConfig& c) {
  if (!c.stretch_compensation) return 0.0;
  double compliance = 1.0 / c.cable.stiffness;
  if (c.carrier.mode == CarrierModel::Mode::kPointMassPd && c.carrier.kp > 0.0) {
    compliance += 1.0 / c.carrier.kp;
  }
  return compliance;
}

VecX resolved_phases(const ScenarioConfig& c, int nullity) {
  if (c.optimizer.phases.empty()) return uniform_phases(nullity);
  return Eigen::Map<const VecX>(c.optimizer.phases.data(),
                                static_cast<Eigen::Index>(c.optimizer.phases.size()));
}

}  // namespace nonstop
