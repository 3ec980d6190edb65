#pragma once

#include <string>
#include <vector>

#include "nonstop/controller.hpp"
#include "nonstop/model.hpp"
#include "nonstop/optimizer.hpp"
#include "nonstop/trajectory.hpp"

namespace nonstop {

struct CableParams {
  double rest_length = 0.8;  // L0 [m]
  double stiffness = 500.0;  // K_c [N/m]
  double damping = 0.1;      // B_c [N s/m]
  bool unilateral = true;

  bool operator==(const CableParams&) const = default;
};

struct CarrierModel {
  enum class Mode { kKinematic, kPointMassPd };
  Mode mode = Mode::kPointMassPd;
  double kp = 1000.0;  // position gain, per axis
  double kd = 1.5;     // derivative gain, per axis

  bool operator==(const CarrierModel&) const = default;
};

// Orientation of the first nullspace basis: the raw SVD output, or the
// circulating pattern of circulating_basis().
enum class BasisOrientation { kSvd, kCirculating };

struct OptimizerConfig {
  bool enabled = true;
  Oscillation initial{1.0, 0.1};
  OscillationBounds bounds;
  OptimizerWeights weights;
  OptimizerSettings settings;
  double period = 0.05;            // [s]
  std::vector<double> phases;      // empty: uniform spacing
  std::vector<int> columns;        // nullspace columns in use; empty: all
  BasisOrientation basis = BasisOrientation::kCirculating;
  int max_fallbacks = -1;          // abort once exceeded; negative: unlimited

  bool operator==(const OptimizerConfig&) const = default;
};

struct TimingConfig {
  double physics_dt = 1e-3;
  double control_period = 5e-3;
  double duration = 25.0;

  bool operator==(const TimingConfig&) const = default;
};

struct OutputConfig {
  bool plotdata = true;

  bool operator==(const OutputConfig&) const = default;
};

// A complete, validated simulation scenario. Defaults reproduce the
// four-carrier study: Table-style physical parameters, a hold / move /
// hold reference and the optimizer switched on.
struct ScenarioConfig {
  std::string name = "reproduction";
  SystemGeometry geometry;  // cable_lengths mirror cable.rest_length
  double load_damping = 0.7;          // linear [N s/m]
  double load_angular_damping = 0.7;  // angular [N m s]
  CableParams cable;
  CarrierModel carrier;
  ControllerGains gains;
  double position_integral_limit = 2.0;
  double attitude_integral_limit = 1.0;
  double tension_floor = 0.05;
  bool stretch_compensation = true;
  double epsilon = 0.2;
  OptimizerConfig optimizer;
  TrajectoryPlan trajectory;
  TimingConfig timing;
  OutputConfig output;

  ScenarioConfig();
};

bool operator==(const SystemGeometry& a, const SystemGeometry& b);
bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

// Default hold 5 s, move 1.5 m along x over 10 s, hold 10 s.
TrajectoryPlan default_trajectory();

// Throws Error(kValidation) naming the first violated precondition.
void validate(const ScenarioConfig& config);

// Compliance that makes the realized tension equal the desired one at
// steady state (cable plus carrier position loop in series), or zero when
// stretch compensation is off.
double command_compliance(const ScenarioConfig& config);

// Phases actually used (uniform when the config leaves them empty).
VecX resolved_phases(const ScenarioConfig& config, int nullity);

}  // namespace nonstop
