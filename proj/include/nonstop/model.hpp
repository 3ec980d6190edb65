#pragma once

#include <vector>

#include "nonstop/so3.hpp"

namespace nonstop {

// Attachment points, cable lengths and inertial parameters of the load and
// its carriers. Construct through make_geometry(), which checks invariants.
struct SystemGeometry {
  std::vector<Vec3> attachments;     // b_i in the load frame [m]
  std::vector<double> cable_lengths; // L_i [m]
  double load_mass = 1.0;            // [kg]
  Mat3 load_inertia = 0.01 * Mat3::Identity();  // [kg m^2], load frame
  std::vector<double> carrier_masses;           // [kg]
  double gravity = 9.81;             // [m/s^2]

  int count() const { return static_cast<int>(attachments.size()); }
};

// Throws Error(kValidation) naming the first violated invariant:
// n >= 3, positive lengths and masses, symmetric positive-definite inertia,
// non-collinear attachments.
void validate_geometry(const SystemGeometry& geom);

// Regular polygon of `n` attachment points at `radius` in the load x-y plane,
// with uniform lengths and carrier masses.
SystemGeometry make_polygon_geometry(int n, double radius, double cable_length,
                                     double load_mass, const Mat3& load_inertia,
                                     double carrier_mass, double gravity = 9.81);

struct LoadState {
  Vec3 position = Vec3::Zero();
  Rotation attitude = Rotation::Identity();
  Vec3 velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();  // load body frame
};

struct CarrierState {
  std::vector<Vec3> position;
  std::vector<Vec3> velocity;
};

struct CableState {
  std::vector<Vec3> direction;  // unit, load -> carrier
  std::vector<double> tension;  // >= 0
  std::vector<Vec3> force;      // tension * direction, acting on the load
};

// World position of attachment point i.
Vec3 attachment_position(const LoadState& load, const SystemGeometry& geom, int i);

// World velocity of attachment point i: v_L + R_L S(w_L) b_i.
Vec3 attachment_velocity(const LoadState& load, const SystemGeometry& geom, int i);

// p_L + R_L b_i + L_i q_i.
Vec3 carrier_position_from_load(const LoadState& load, const Vec3& direction,
                                const SystemGeometry& geom, int i);

// v_L + R_L S(w_L) b_i + L_i q_dot_i. Requires q_dot_i orthogonal to q_i.
Vec3 carrier_velocity_from_load(const LoadState& load, const Vec3& direction,
                                const Vec3& direction_rate,
                                const SystemGeometry& geom, int i);

struct CableDirection {
  Vec3 direction;
  double length;
};

// Unit vector and distance from attachment i to the carrier at `carrier_pos`.
CableDirection cable_direction(const Vec3& carrier_pos, const LoadState& load,
                               const SystemGeometry& geom, int i);

inline constexpr double kDegenerateDistance = 1e-9;

}  // namespace nonstop
