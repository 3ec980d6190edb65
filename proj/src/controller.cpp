#include "nonstop/controller.hpp"

#include "nonstop/error.hpp"

namespace nonstop {

TrackingError compute_errors(const LoadState& state, const DesiredLoadSample& ref) {
  TrackingError e;
  e.position = state.position - ref.position;
  e.velocity = state.velocity - ref.velocity;
  const Mat3 rel = ref.attitude.transpose() * state.attitude;
  e.attitude = 0.5 * vee(rel - rel.transpose());
  // Desired rate arrives in the world frame; bring it into the load frame.
  const Vec3 desired_body = state.attitude.transpose() * ref.angular_velocity;
  e.angular_velocity = state.angular_velocity - desired_body;
  return e;
}

Wrench wrench_pid(const TrackingError& err, const LoadState& state,
                  const ControllerGains& gains, const SystemGeometry& geom) {
  Wrench w;
  w.force = -gains.kp.cwiseProduct(err.position) - gains.kv.cwiseProduct(err.velocity) -
            gains.ki.cwiseProduct(err.position_integral) +
            geom.load_mass * geom.gravity * e3();
  const Vec3& omega = state.angular_velocity;
  w.torque = -gains.kr.cwiseProduct(err.attitude) - gains.kw.cwiseProduct(err.angular_velocity) -
             gains.kir.cwiseProduct(err.attitude_integral) +
             omega.cross(geom.load_inertia * omega);
  return w;
}

WrenchController::WrenchController(ControllerGains gains, double position_integral_limit,
                                   double attitude_integral_limit)
    : gains_(std::move(gains)),
      int_p_limit_(position_integral_limit),
      int_r_limit_(attitude_integral_limit) {
  if (!(int_p_limit_ >= 0.0) || !(int_r_limit_ >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "integral limits must be nonnegative");
  }
}

TrackingError WrenchController::update(const LoadState& state, const DesiredLoadSample& ref,
                                       double dt) {
  TrackingError e = compute_errors(state, ref);
  if (primed_ && dt > 0.0) {
    e.position_integral = (last_.position_integral + 0.5 * dt * (last_.position + e.position))
                              .cwiseMax(-int_p_limit_)
                              .cwiseMin(int_p_limit_);
    e.attitude_integral = (last_.attitude_integral + 0.5 * dt * (last_.attitude + e.attitude))
                              .cwiseMax(-int_r_limit_)
                              .cwiseMin(int_r_limit_);
  } else if (primed_) {
    e.position_integral = last_.position_integral;
    e.attitude_integral = last_.attitude_integral;
  }
  primed_ = true;
  last_ = e;
  return e;
}

Wrench WrenchController::command(const LoadState& state, const DesiredLoadSample& ref,
                                 double dt, const SystemGeometry& geom) {
  return wrench_pid(update(state, ref, dt), state, gains_, geom);
}

}  // namespace nonstop
