#pragma once

#include <vector>

#include "nonstop/controller.hpp"
#include "nonstop/grasp.hpp"

namespace nonstop {

// How the commanded cable length follows the desired tension. With
// compliance c the carrier is placed at L_i + c T_i from its attachment, so
// an elastic cable (and a compliant carrier position loop) realizes T_i.
// c = 0 is the inextensible model.
struct CableLengthModel {
  double compliance = 0.0;  // [m/N]
  double tension_floor = 0.05;  // [N]

  double length(double nominal, double tension) const { return nominal + compliance * tension; }
};

struct DesiredCarrierSample {
  std::vector<Vec3> position;
  std::vector<Vec3> velocity;
  std::vector<Vec3> direction;       // q_d, unit
  std::vector<Vec3> direction_rate;  // q_dot_d, orthogonal to q_d
  std::vector<Vec3> force;           // f_d,i
  std::vector<double> tension;       // T_d,i
  std::vector<double> length;        // commanded cable length
};

struct VelocityDecomposition {
  std::vector<Vec3> load_point_velocity;  // v_Li
  std::vector<Mat3> projector;            // Pi_i
  std::vector<Vec3> external;             // Pi_i e_i [N/s]
  std::vector<Vec3> internal;             // Pi_i g_i [N/s]
  std::vector<double> tension;            // T_i
  std::vector<double> length;             // L_i used in the prediction
  std::vector<Vec3> predicted;            // carrier velocity
};

struct ForceRateSplit {
  VecX external;  // G_dot^+ w + G^+ w_dot
  VecX internal;  // N_dot lambda + N lambda_dot
  bool warm_up;   // N_dot was unavailable and taken as zero
};

// I - q q^T. Throws kInvalidArgument when |q| differs from 1 by more than 1e-9.
Mat3 projector(const Vec3& direction);

ForceRateSplit external_internal_split(const AllocationFrame& frame, const Vec6& wrench,
                                       const Vec6& wrench_rate, const VecX& lambda,
                                       const VecX& lambda_rate);

// Carrier positions and velocities that realize `forces` given the measured
// load state. Throws LowTensionError when a desired tension is at or below
// the floor.
DesiredCarrierSample desired_carrier_targets(const VecX& forces, const VecX& force_rates,
                                             const LoadState& load, const SystemGeometry& geom,
                                             const CableLengthModel& lengths = {});

// v_Li + (L_i / T_i)(Pi_i e_i + Pi_i g_i) for every carrier.
VelocityDecomposition predict_carrier_velocities(const LoadState& load,
                                                 const SystemGeometry& geom,
                                                 const VecX& forces, const ForceRateSplit& split,
                                                 const CableLengthModel& lengths = {});

// ||v|| - epsilon.
double nonstop_margin(const Vec3& velocity, double epsilon);

}  // namespace nonstop
