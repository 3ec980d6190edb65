#pragma once

#include <vector>

#include "nonstop/feasibility.hpp"

namespace nonstop {

// Decision variables of the internal-force layer: frequency and amplitude of
// lambda_j(t) = A cos(xi t + phi_j).
struct Oscillation {
  double frequency = 1.0;  // xi [rad/s]
  double amplitude = 0.1;  // A [N]

  bool operator==(const Oscillation&) const = default;
};

struct OscillationBounds {
  double frequency_min = 0.1;
  double frequency_max = 8.0;
  double amplitude_min = 0.0;
  double amplitude_max = 3.0;

  bool contains(const Oscillation& x) const {
    return x.frequency >= frequency_min && x.frequency <= frequency_max &&
           x.amplitude >= amplitude_min && x.amplitude <= amplitude_max;
  }
  bool operator==(const OscillationBounds&) const = default;
};

struct InternalForceParams {
  Oscillation x;
  VecX phases;  // one per nullspace direction in use, fixed for the run
  OscillationBounds bounds;
};

// Uniform phases -pi + 2 pi j / k.
VecX uniform_phases(int k);

struct OptimizerWeights {
  double position = 1.0;  // w_pos [1/N^2]
  double velocity = 1.0;  // w_vel [s^2/N^2]

  bool operator==(const OptimizerWeights&) const = default;
};

struct LambdaSample {
  VecX value;  // [N]
  VecX rate;   // [N/s]
};

LambdaSample lambda_eval(const Oscillation& x, const VecX& phases, double t);
inline LambdaSample lambda_eval(const InternalForceParams& p, double t) {
  return lambda_eval(p.x, p.phases, t);
}

// (xi - xi')^2 + (A - A')^2 + w_pos |lambda(x) - lambda(x')|^2
//   + w_vel |lambda_dot(x) - lambda_dot(x')|^2, all at time t.
double objective(const Oscillation& x, const Oscillation& previous, double t,
                 const VecX& phases, const OptimizerWeights& weights);

// Everything the velocity-floor constraint needs at one control instant.
struct ControlSnapshot {
  double t = 0.0;
  AllocationFrame frame;
  Vec6 wrench = Vec6::Zero();
  Vec6 wrench_rate = Vec6::Zero();
  LoadState load;
  SystemGeometry geometry;
  CableLengthModel lengths;
  double epsilon = 0.2;
};

// Per-carrier ||v_pred,i|| - epsilon with lambda(x) at snapshot.t. Throws
// LowTensionError if x drives a tension below the floor.
VecX constraint_margins(const Oscillation& x, const VecX& phases, const ControlSnapshot& snap);

struct OptimizerSettings {
  int grid = 41;               // points per axis
  int polish_iterations = 80;  // Nelder-Mead budget
  int lookahead_samples = 0;   // 0: pointwise constraint at t only

  bool operator==(const OptimizerSettings&) const = default;
};

struct OptimizationOutcome {
  Oscillation x_star;
  bool feasible = false;
  double worst_margin = 0.0;
  int iterations = 0;
  bool fallback_used = false;
};

// Minimizes the objective subject to all margins >= 0 inside the bounds.
// A feasible previous point is returned unchanged. With no feasible grid
// point the grid point with the largest worst-case margin is returned and
// fallback_used is set.
OptimizationOutcome optimize(const Oscillation& previous, const ControlSnapshot& snap,
                             const OptimizerWeights& weights, const InternalForceParams& params,
                             const OptimizerSettings& settings = {});

// Smallest worst-case margin over carriers (and look-ahead samples), or
// -infinity when a tension floor is violated.
double worst_margin(const Oscillation& x, const VecX& phases, const ControlSnapshot& snap,
                    int lookahead_samples = 0);

// Number of control ticks between optimizer runs: ceil(opt / control).
int step_schedule(double optimizer_period, double control_period);

}  // namespace nonstop
