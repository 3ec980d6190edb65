#pragma once

#include "nonstop/model.hpp"
#include "nonstop/trajectory.hpp"

namespace nonstop {

struct TrackingError {
  Vec3 position = Vec3::Zero();          // e_p [m]
  Vec3 velocity = Vec3::Zero();          // e_v [m/s]
  Vec3 attitude = Vec3::Zero();          // e_R
  Vec3 angular_velocity = Vec3::Zero();  // e_w [rad/s], body frame
  Vec3 position_integral = Vec3::Zero(); // [m s]
  Vec3 attitude_integral = Vec3::Zero(); // [s]
};

// Diagonal gains (each entry >= 0).
struct ControllerGains {
  Vec3 kp = Vec3::Constant(5.0);
  Vec3 kv = Vec3::Constant(2.0);
  Vec3 ki = Vec3::Constant(0.9);
  Vec3 kr = Vec3::Constant(0.5);
  Vec3 kw = Vec3::Constant(0.06);
  Vec3 kir = Vec3::Constant(0.1);

  bool operator==(const ControllerGains&) const = default;
};

struct Wrench {
  Vec3 force = Vec3::Zero();   // world frame [N]
  Vec3 torque = Vec3::Zero();  // load frame [N m]

  Vec6 stacked() const {
    Vec6 w;
    w << force, torque;
    return w;
  }
};

// Pose and twist errors. e_w = w_L - R_L^T R_Ld w_Ld so that -K_w e_w damps
// the rate error. Integral fields are left at zero.
TrackingError compute_errors(const LoadState& state, const DesiredLoadSample& ref);

// f_d = -Kp e_p - Kv e_v - Ki int(e_p) + m g e3
// tau_d = -KR e_R - Kw e_w - KiR int(e_R) + w x (J w)
Wrench wrench_pid(const TrackingError& err, const LoadState& state,
                  const ControllerGains& gains, const SystemGeometry& geom);

// Owns the integral states. Integrals use the trapezoidal rule and are
// clamped per axis.
class WrenchController {
 public:
  WrenchController(ControllerGains gains, double position_integral_limit = 2.0,
                   double attitude_integral_limit = 1.0);

  // Advances the integrals by `dt` (zero on the first call) and returns the
  // full error.
  TrackingError update(const LoadState& state, const DesiredLoadSample& ref, double dt);

  Wrench command(const LoadState& state, const DesiredLoadSample& ref, double dt,
                 const SystemGeometry& geom);

  const ControllerGains& gains() const { return gains_; }
  const TrackingError& last_error() const { return last_; }

 private:
  ControllerGains gains_;
  double int_p_limit_;
  double int_r_limit_;
  bool primed_ = false;
  TrackingError last_;
};

}  // namespace nonstop
