#include "nonstop/feasibility.hpp"

#include <cmath>

#include "nonstop/error.hpp"

namespace nonstop {

namespace {

void check_sizes(const VecX& v, const SystemGeometry& geom, const char* what) {
  if (v.size() != 3 * geom.count()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": expected a 3n vector");
  }
}

double checked_tension(const Vec3& f, int i, const CableLengthModel& lengths) {
  const double t = f.norm();
  if (!(t > lengths.tension_floor)) throw LowTensionError(i, t, lengths.tension_floor);
  return t;
}

}  // namespace

Mat3 projector(const Vec3& direction) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "projector: direction is not unit");
  }
  return Mat3::Identity() - direction * direction.transpose();
}

ForceRateSplit external_internal_split(const AllocationFrame& frame, const Vec6& wrench,
                                       const Vec6& wrench_rate, const VecX& lambda,
                                       const VecX& lambda_rate) {
  if (lambda.size() != frame.nullity() || lambda_rate.size() != frame.nullity()) {
    throw Error(ErrorCode::kInvalidArgument, "external_internal_split: lambda size mismatch");
  }
  ForceRateSplit s;
  s.external = frame.grasp_pinv_dot * wrench + frame.grasp_pinv * wrench_rate;
  s.internal = frame.nullspace_dot * lambda + frame.nullspace * lambda_rate;
  s.warm_up = frame.warm_up;
  return s;
}

DesiredCarrierSample desired_carrier_targets(const VecX& forces, const VecX& force_rates,
                                             const LoadState& load, const SystemGeometry& geom,
                                             const CableLengthModel& lengths) {
  check_sizes(forces, geom, "desired_carrier_targets");
  check_sizes(force_rates, geom, "desired_carrier_targets");
  const int n = geom.count();
  DesiredCarrierSample out;
  out.position.resize(n);
  out.velocity.resize(n);
  out.direction.resize(n);
  out.direction_rate.resize(n);
  out.force.resize(n);
  out.tension.resize(n);
  out.length.resize(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 f = forces.segment<3>(3 * i);
    const Vec3 fdot = force_rates.segment<3>(3 * i);
    const double tension = checked_tension(f, i, lengths);
    const Vec3 q = f / tension;
    const Vec3 qdot = (fdot - q * q.dot(fdot)) / tension;
    const double len = lengths.length(geom.cable_lengths[i], tension);
    const double len_rate = lengths.compliance * q.dot(fdot);
    out.force[i] = f;
    out.tension[i] = tension;
    out.direction[i] = q;
    out.direction_rate[i] = qdot;
    out.length[i] = len;
    out.position[i] = attachment_position(load, geom, i) + len * q;
    out.velocity[i] = attachment_velocity(load, geom, i) + len * qdot + len_rate * q;
  }
  return out;
}

VelocityDecomposition predict_carrier_velocities(const LoadState& load,
                                                 const SystemGeometry& geom,
                                                 const VecX& forces, const ForceRateSplit& split,
                                                 const CableLengthModel& lengths) {
  check_sizes(forces, geom, "predict_carrier_velocities");
  check_sizes(split.external, geom, "predict_carrier_velocities");
  check_sizes(split.internal, geom, "predict_carrier_velocities");
  const int n = geom.count();
  VelocityDecomposition d;
  d.load_point_velocity.resize(n);
  d.projector.resize(n);
  d.external.resize(n);
  d.internal.resize(n);
  d.tension.resize(n);
  d.length.resize(n);
  d.predicted.resize(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 f = forces.segment<3>(3 * i);
    const double tension = checked_tension(f, i, lengths);
    const Vec3 q = f / tension;
    const Mat3 pi = Mat3::Identity() - q * q.transpose();
    d.load_point_velocity[i] = attachment_velocity(load, geom, i);
    d.projector[i] = pi;
    d.external[i] = pi * split.external.segment<3>(3 * i);
    d.internal[i] = pi * split.internal.segment<3>(3 * i);
    d.tension[i] = tension;
    d.length[i] = lengths.length(geom.cable_lengths[i], tension);
    d.predicted[i] = d.load_point_velocity[i] +
                     (d.length[i] / tension) * (d.external[i] + d.internal[i]);
  }
  return d;
}

double nonstop_margin(const Vec3& velocity, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "nonstop_margin: epsilon must be positive");
  return velocity.norm() - epsilon;
}

}  // namespace nonstop
