#include "nonstop/simulator.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <string>

namespace nonstop {

namespace {

// Right-trivialized inverse dexp, truncated after the second-order term:
// theta_dot for R = R0 Exp(theta) moving with body rate w.
Vec3 rotation_vector_rate(const Vec3& theta, const Vec3& w) {
  return w + 0.5 * theta.cross(w) + (1.0 / 12.0) * theta.cross(theta.cross(w));
}

struct LoadIncrement {
  Vec3 dp, dv, dtheta, dw;
};

LoadState displaced(const LoadState& base, const Vec3& p, const Vec3& v, const Vec3& theta,
                    const Vec3& w) {
  LoadState s;
  s.position = p;
  s.velocity = v;
  s.attitude = base.attitude * exp_so3(theta);
  s.angular_velocity = w;
  return s;
}

// Full physical state during one physics step: load in local coordinates
// around the step's starting attitude plus every carrier.
struct PhysicsState {
  Vec3 p, v, theta, w;
  std::vector<Vec3> cp, cv;
};

struct PhysicsRate {
  Vec3 dp, dv, dtheta, dw;
  std::vector<Vec3> dcp, dcv;
};

PhysicsState advance(const PhysicsState& s, const PhysicsRate& r, double h) {
  PhysicsState o = s;
  o.p += h * r.dp;
  o.v += h * r.dv;
  o.theta += h * r.dtheta;
  o.w += h * r.dw;
  for (std::size_t i = 0; i < s.cp.size(); ++i) {
    o.cp[i] += h * r.dcp[i];
    o.cv[i] += h * r.dcv[i];
  }
  return o;
}

void check_dt(double dt) {
  if (!(dt > 0.0) || dt > 0.01) {
    throw Error(ErrorCode::kInvalidArgument, "physics step must lie in (0, 0.01] s");
  }
}

}  // namespace

CableForce cable_force_on_load(const Vec3& carrier_pos, const Vec3& carrier_vel,
                               const LoadState& load, const SystemGeometry& geom,
                               const CableParams& params, int i) {
  const auto dir = cable_direction(carrier_pos, load, geom, i);
  const double stretch = dir.length - params.rest_length;
  const double rate = (carrier_vel - attachment_velocity(load, geom, i)).dot(dir.direction);
  double tension = params.stiffness * stretch + params.damping * rate;
  if (params.unilateral) tension = std::max(0.0, tension);
  return {tension * dir.direction, tension};
}

LoadRates load_dynamics(const LoadState& load, const std::vector<Vec3>& forces,
                        const SystemGeometry& geom, const LoadDamping& damping) {
  const int n = geom.count();
  if (static_cast<int>(forces.size()) != n) {
    throw Error(ErrorCode::kInvalidArgument, "load_dynamics: one force per carrier expected");
  }
  Vec3 total = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  const Mat3 rt = load.attitude.transpose();
  for (int i = 0; i < n; ++i) {
    total += forces[i];
    torque += geom.attachments[i].cross(rt * forces[i]);
  }
  const Vec3& w = load.angular_velocity;
  LoadRates r;
  r.acceleration = -geom.gravity * e3() + (total - damping.linear * load.velocity) / geom.load_mass;
  r.angular_acceleration =
      geom.load_inertia.ldlt().solve(-w.cross(geom.load_inertia * w) + torque - damping.angular * w);
  return r;
}

LoadState load_step(const LoadState& load, const std::vector<Vec3>& forces,
                    const SystemGeometry& geom, const LoadDamping& damping, double dt) {
  check_dt(dt);
  auto rate = [&](const Vec3& p, const Vec3& v, const Vec3& theta, const Vec3& w) {
    const LoadState s = displaced(load, p, v, theta, w);
    const auto acc = load_dynamics(s, forces, geom, damping);
    return LoadIncrement{v, acc.acceleration, rotation_vector_rate(theta, w),
                         acc.angular_acceleration};
  };
  const Vec3 p0 = load.position, v0 = load.velocity, th0 = Vec3::Zero(), w0 = load.angular_velocity;
  const auto k1 = rate(p0, v0, th0, w0);
  const auto k2 = rate(p0 + 0.5 * dt * k1.dp, v0 + 0.5 * dt * k1.dv, th0 + 0.5 * dt * k1.dtheta,
                       w0 + 0.5 * dt * k1.dw);
  const auto k3 = rate(p0 + 0.5 * dt * k2.dp, v0 + 0.5 * dt * k2.dv, th0 + 0.5 * dt * k2.dtheta,
                       w0 + 0.5 * dt * k2.dw);
  const auto k4 = rate(p0 + dt * k3.dp, v0 + dt * k3.dv, th0 + dt * k3.dtheta, w0 + dt * k3.dw);
  LoadState out;
  out.position = p0 + dt / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
  out.velocity = v0 + dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  const Vec3 theta = dt / 6.0 * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta);
  out.angular_velocity = w0 + dt / 6.0 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
  out.attitude = orthonormalize(load.attitude * exp_so3(theta));
  return out;
}

PointMass carrier_step(const PointMass& carrier, const CarrierTarget& target,
                       const Vec3& reaction, const CarrierModel& model, double mass, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "carrier_step: dt must be positive");
  if (model.mode == CarrierModel::Mode::kKinematic) {
    return {target.position + dt * target.velocity, target.velocity};
  }
  auto accel = [&](double tau, const Vec3& p, const Vec3& v) {
    const Vec3 pd = target.position + tau * target.velocity;
    return Vec3((model.kp * (pd - p) + model.kd * (target.velocity - v) - reaction) / mass);
  };
  const Vec3 p0 = carrier.position, v0 = carrier.velocity;
  const Vec3 a1 = accel(0.0, p0, v0);
  const Vec3 v1 = v0;
  const Vec3 a2 = accel(0.5 * dt, p0 + 0.5 * dt * v1, v0 + 0.5 * dt * a1);
  const Vec3 v2 = v0 + 0.5 * dt * a1;
  const Vec3 a3 = accel(0.5 * dt, p0 + 0.5 * dt * v2, v0 + 0.5 * dt * a2);
  const Vec3 v3 = v0 + 0.5 * dt * a2;
  const Vec3 a4 = accel(dt, p0 + dt * v3, v0 + dt * a3);
  const Vec3 v4 = v0 + dt * a3;
  return {p0 + dt / 6.0 * (v1 + 2.0 * v2 + 2.0 * v3 + v4),
          v0 + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)};
}

namespace {

// Coupled RK4 over load and carriers; cable forces are re-evaluated at every
// stage. Carrier targets follow a first-order hold from the control tick.
class Physics {
 public:
  Physics(const ScenarioConfig& cfg)
      : cfg_(cfg), geom_(cfg.geometry), damping_{cfg.load_damping, cfg.load_angular_damping} {}

  void step(LoadState& load, CarrierState& carriers, const DesiredCarrierSample& targets,
            double since_tick, double dt) const {
    const int n = geom_.count();
    PhysicsState s0{load.position, load.velocity, Vec3::Zero(), load.angular_velocity,
                    carriers.position, carriers.velocity};
    auto rate = [&](const PhysicsState& s, double tau) {
      const LoadState ls = displaced(load, s.p, s.v, s.theta, s.w);
      PhysicsRate r;
      r.dcp.resize(n);
      r.dcv.resize(n);
      std::vector<Vec3> forces(n);
      for (int i = 0; i < n; ++i) {
        const Vec3 pd = targets.position[i] + (since_tick + tau) * targets.velocity[i];
        const bool kinematic = cfg_.carrier.mode == CarrierModel::Mode::kKinematic;
        const Vec3 cp = kinematic ? pd : s.cp[i];
        const Vec3 cv = kinematic ? targets.velocity[i] : s.cv[i];
        const auto cf = cable_force_on_load(cp, cv, ls, geom_, cfg_.cable, i);
        forces[i] = cf.force;
        if (kinematic) {
          r.dcp[i] = targets.velocity[i];
          r.dcv[i] = Vec3::Zero();
        } else {
          r.dcp[i] = s.cv[i];
          r.dcv[i] = (cfg_.carrier.kp * (pd - s.cp[i]) +
                      cfg_.carrier.kd * (targets.velocity[i] - s.cv[i]) - cf.force) /
                     geom_.carrier_masses[i];
        }
      }
      const auto acc = load_dynamics(ls, forces, geom_, damping_);
      r.dp = s.v;
      r.dv = acc.acceleration;
      r.dtheta = rotation_vector_rate(s.theta, s.w);
      r.dw = acc.angular_acceleration;
      return r;
    };
    const auto k1 = rate(s0, 0.0);
    const auto k2 = rate(advance(s0, k1, 0.5 * dt), 0.5 * dt);
    const auto k3 = rate(advance(s0, k2, 0.5 * dt), 0.5 * dt);
    const auto k4 = rate(advance(s0, k3, dt), dt);
    PhysicsState s = s0;
    s = advance(s, k1, dt / 6.0);
    s = advance(s, k2, dt / 3.0);
    s = advance(s, k3, dt / 3.0);
    s = advance(s, k4, dt / 6.0);
    load.position = s.p;
    load.velocity = s.v;
    load.angular_velocity = s.w;
    load.attitude = orthonormalize(load.attitude * exp_so3(s.theta));
    if (cfg_.carrier.mode == CarrierModel::Mode::kKinematic) {
      for (int i = 0; i < n; ++i) {
        carriers.position[i] = targets.position[i] + (since_tick + dt) * targets.velocity[i];
        carriers.velocity[i] = targets.velocity[i];
      }
    } else {
      carriers.position = s.cp;
      carriers.velocity = s.cv;
    }
  }

 private:
  const ScenarioConfig& cfg_;
  const SystemGeometry& geom_;
  LoadDamping damping_;
};

void check_physical(const LoadState& load, const CarrierState& carriers) {
  bool ok = load.position.allFinite() && load.velocity.allFinite() &&
            load.angular_velocity.allFinite() && is_rotation(load.attitude, 1e-6);
  for (std::size_t i = 0; ok && i < carriers.position.size(); ++i) {
    ok = carriers.position[i].allFinite() && carriers.velocity[i].allFinite();
  }
  if (!ok) throw Error(ErrorCode::kSimulationAbort, "simulation state diverged");
}

}  // namespace

SimTrace run_closed_loop(const ScenarioConfig& config) {
  validate(config);
  const SystemGeometry& geom = config.geometry;
  const int n = geom.count();
  const double ctrl = config.timing.control_period;
  const double dt = config.timing.physics_dt;
  const int substeps = static_cast<int>(std::lround(ctrl / dt));
  const long ticks = static_cast<long>(std::floor(config.timing.duration / ctrl + 1e-9));
  const bool optimizing = config.optimizer.enabled;
  const int every = optimizing ? step_schedule(config.optimizer.period, ctrl) : 0;

  SimTrace trace;
  trace.carriers = n;
  trace.sample_period = ctrl;
  trace.epsilon = config.epsilon;
  trace.records.reserve(static_cast<std::size_t>(ticks + 1));

  const int nullity = 3 * n - 6;
  std::optional<MatX> seed;
  if (config.optimizer.basis == BasisOrientation::kCirculating && config.optimizer.columns.empty()) {
    seed = circulating_basis(config.trajectory.attitude, geom, resolved_phases(config, nullity));
  }
  AllocationTracker tracker(geom, seed);
  WrenchController controller(config.gains, config.position_integral_limit,
                              config.attitude_integral_limit);
  const CableLengthModel lengths{command_compliance(config), config.tension_floor};
  const Physics physics(config);

  InternalForceParams params;
  params.x = config.optimizer.initial;
  params.bounds = config.optimizer.bounds;

  LoadState load;
  load.position = config.trajectory.initial_position;
  load.attitude = config.trajectory.attitude;
  CarrierState carriers;
  Vec6 previous_wrench = Vec6::Zero();

  try {
    for (long k = 0; k <= ticks; ++k) {
      const double t = static_cast<double>(k) * ctrl;
      const DesiredLoadSample ref = sample(config.trajectory, t);
      const TrackingError err = controller.update(load, ref, k == 0 ? 0.0 : ctrl);
      const Vec6 wrench = wrench_pid(err, load, config.gains, geom).stacked();
      const Vec6 wrench_rate = k == 0 ? Vec6::Zero() : Vec6((wrench - previous_wrench) / ctrl);
      previous_wrench = wrench;

      const AllocationFrame frame = restrict_nullspace(
          tracker.update(t, load.attitude, load.angular_velocity), config.optimizer.columns);
      if (k == 0) params.phases = resolved_phases(config, frame.nullity());

      TraceRecord rec;
      if (optimizing && k % every == 0) {
        ControlSnapshot snap{t, frame, wrench, wrench_rate, load, geom, lengths, config.epsilon};
        const auto outcome = optimize(params.x, snap, config.optimizer.weights, params,
                                      config.optimizer.settings);
        params.x = outcome.x_star;
        rec.optimizer_ran = true;
        rec.optimizer_feasible = outcome.feasible;
        rec.fallback_used = outcome.fallback_used;
        ++trace.optimizer_runs;
        if (outcome.fallback_used) {
          ++trace.fallback_count;
          if (config.optimizer.max_fallbacks >= 0 &&
              trace.fallback_count > config.optimizer.max_fallbacks) {
            throw Error(ErrorCode::kOptimizerFailure,
                        "optimizer found no feasible point more often than the fallback budget allows");
          }
        }
      }

      const auto lam = lambda_eval(params, t);
      const VecX forces = allocate_forces(wrench, frame, lam.value);
      const auto split = external_internal_split(frame, wrench, wrench_rate, lam.value, lam.rate);
      const VecX force_rates = split.external + split.internal;
      const auto targets = desired_carrier_targets(forces, force_rates, load, geom, lengths);
      const auto decomposition = predict_carrier_velocities(load, geom, forces, split, lengths);

      if (k == 0) {
        // Start at rest in force balance: each cable already carries its
        // desired tension.
        carriers.position.resize(n);
        carriers.velocity.resize(n);
        for (int i = 0; i < n; ++i) {
          const double stretch = targets.tension[i] / config.cable.stiffness;
          carriers.position[i] = attachment_position(load, geom, i) +
                                 (config.cable.rest_length + stretch) * targets.direction[i];
          carriers.velocity[i] = targets.velocity[i];
        }
      }

      rec.t = t;
      rec.load = load;
      rec.reference = ref;
      rec.carrier_position = carriers.position;
      rec.carrier_velocity = carriers.velocity;
      rec.desired_position = targets.position;
      rec.desired_velocity = targets.velocity;
      rec.predicted_velocity = decomposition.predicted;
      rec.desired_tension = targets.tension;
      rec.tension.resize(n);
      rec.margin.resize(n);
      for (int i = 0; i < n; ++i) {
        rec.tension[i] = cable_force_on_load(carriers.position[i], carriers.velocity[i], load,
                                             geom, config.cable, i).tension;
        rec.margin[i] = nonstop_margin(decomposition.predicted[i], config.epsilon);
      }
      rec.position_error = err.position;
      rec.attitude_error = err.attitude;
      rec.wrench = wrench;
      rec.x = params.x;
      trace.records.push_back(std::move(rec));

      if (k == ticks) break;
      for (int s = 0; s < substeps; ++s) {
        physics.step(load, carriers, targets, s * dt, dt);
      }
      check_physical(load, carriers);
    }
  } catch (const Error& e) {
    trace.aborted = true;
    trace.abort_code = e.code();
    trace.abort_reason = e.what();
  }
  return trace;
}

}  // namespace nonstop
