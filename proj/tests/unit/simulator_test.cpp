#include "nonstop/simulator.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "nonstop/error.hpp"
#include "support/test_support.hpp"

namespace nonstop {
namespace {

using testing::Gen;

SystemGeometry square(double mass = 1.0) {
  return make_polygon_geometry(4, 0.3, 0.8, mass, 0.01 * Mat3::Identity(), 0.01);
}

TEST(CableForce, SlackCableIsZero) {
  const SystemGeometry g = square();
  const LoadState load;
  const Vec3 p = attachment_position(load, g, 0) + 0.7 * e3();
  const auto c = cable_force_on_load(p, Vec3::Zero(), load, g, CableParams{}, 0);
  EXPECT_EQ(c.tension, 0.0);
  EXPECT_TRUE(c.force.isZero(0.0));
}

TEST(CableForce, StaticStretch) {
  const SystemGeometry g = square();
  const LoadState load;
  const Vec3 p = attachment_position(load, g, 1) + 0.82 * e3();
  const auto c = cable_force_on_load(p, Vec3::Zero(), load, g, CableParams{}, 1);
  EXPECT_NEAR(c.tension, 10.0, 1e-12);
  EXPECT_LT((c.force - Vec3(0, 0, 10)).norm(), 1e-12);
}

TEST(CableForce, DampingActsAlongCable) {
  const SystemGeometry g = square();
  const LoadState load;
  const Vec3 p = attachment_position(load, g, 0) + 0.82 * e3();
  const CableParams params;
  // transverse carrier motion does not change the tension
  EXPECT_NEAR(cable_force_on_load(p, Vec3(3, -2, 0), load, g, params, 0).tension, 10.0, 1e-12);
  EXPECT_NEAR(cable_force_on_load(p, Vec3(0, 0, 1), load, g, params, 0).tension, 10.1, 1e-12);
  // a bilateral cable may push
  CableParams bilateral;
  bilateral.unilateral = false;
  const Vec3 q = attachment_position(load, g, 0) + 0.78 * e3();
  EXPECT_NEAR(cable_force_on_load(q, Vec3::Zero(), load, g, bilateral, 0).tension, -10.0, 1e-12);
  EXPECT_EQ(cable_force_on_load(q, Vec3::Zero(), load, g, params, 0).tension, 0.0);
}

TEST(CableForce, DegenerateDirection) {
  const SystemGeometry g = square();
  const LoadState load;
  EXPECT_THROW(cable_force_on_load(attachment_position(load, g, 0), Vec3::Zero(), load, g, CableParams{}, 0), Error);
}

// Carriers fixed above their attachments with the static stretch of a 1 kg
// load: force balance predicts sum T = m g and stretch m g / (n K_c).
TEST(StaticHang, ForceBalanceAndRest) {
  const SystemGeometry g = square();
  const CableParams params;
  const double stretch = g.load_mass * g.gravity / (4 * params.stiffness);
  LoadState load;
  std::vector<Vec3> carriers;
  for (int i = 0; i < 4; ++i) carriers.push_back(attachment_position(load, g, i) + (0.8 + stretch) * e3());
  double total = 0.0;
  for (int i = 0; i < 4; ++i) total += cable_force_on_load(carriers[i], Vec3::Zero(), load, g, params, i).tension;
  EXPECT_NEAR(total, 9.81, 1e-12);
  EXPECT_NEAR(stretch, 9.81 / 2000.0, 1e-15);
  for (int k = 0; k < 1000; ++k) {
    std::vector<Vec3> forces;
    for (int i = 0; i < 4; ++i) forces.push_back(cable_force_on_load(carriers[i], Vec3::Zero(), load, g, params, i).force);
    load = load_step(load, forces, g, LoadDamping{}, 1e-3);
  }
  EXPECT_LT(load.position.norm(), 1e-9);
  EXPECT_LT(load.velocity.norm(), 1e-9);
  EXPECT_LT((load.attitude - Rotation::Identity()).norm(), 1e-9);
}

TEST(LoadStep, FreeFall) {
  const SystemGeometry g = square();
  LoadState load;
  const std::vector<Vec3> none(4, Vec3::Zero());
  for (int k = 0; k < 1000; ++k) load = load_step(load, none, g, LoadDamping{0.0, 0.0}, 1e-3);
  EXPECT_NEAR(load.velocity.z(), -9.81, 1e-9);
  EXPECT_NEAR(load.position.z(), -0.5 * 9.81, 1e-9);
  EXPECT_NEAR(load.velocity.head<2>().norm(), 0.0, 1e-15);
}

TEST(LoadStep, SingleCentralCableHoldsLoad) {
  SystemGeometry g = square();
  LoadState load;
  load.position = Vec3(0.2, -0.1, 1.0);
  std::vector<Vec3> forces(4, Vec3::Zero());
  // equal shares through symmetric attachments act like one central cable
  for (auto& f : forces) f = 0.25 * g.load_mass * g.gravity * e3();
  for (int k = 0; k < 500; ++k) load = load_step(load, forces, g, LoadDamping{}, 1e-3);
  EXPECT_LT((load.position - Vec3(0.2, -0.1, 1.0)).norm(), 1e-12);
  EXPECT_LT(load.angular_velocity.norm(), 1e-12);
}

TEST(LoadStep, TorqueFreeSpinIsotropic) {
  const SystemGeometry g = square();
  LoadState load;
  load.angular_velocity = Vec3(0.4, -1.2, 2.0);
  const std::vector<Vec3> none(4, Vec3::Zero());
  const Vec3 w0 = load.angular_velocity;
  for (int k = 0; k < 5000; ++k) {
    load = load_step(load, none, g, LoadDamping{0.0, 0.0}, 1e-3);
    ASSERT_TRUE(is_rotation(load.attitude));
  }
  EXPECT_LT((load.angular_velocity - w0).norm(), 1e-12);
  // constant body rate about a fixed axis: R(t) = Exp(w t)
  EXPECT_LT((load.attitude - exp_so3(5.0 * w0)).norm(), 1e-8);
}

TEST(LoadStep, TorqueFreeSpinConservesMomentumAndEnergy) {
  SystemGeometry g = square();
  g.load_inertia = Vec3(0.01, 0.02, 0.03).asDiagonal();
  LoadState load;
  load.angular_velocity = Vec3(0.3, 2.0, 0.5);
  const std::vector<Vec3> none(4, Vec3::Zero());
  const Vec3 l0 = g.load_inertia * load.angular_velocity;
  const double e0 = 0.5 * load.angular_velocity.dot(l0);
  for (int k = 0; k < 10000; ++k) load = load_step(load, none, g, LoadDamping{0.0, 0.0}, 1e-3);
  const Vec3 l1 = load.attitude * g.load_inertia * load.angular_velocity;
  EXPECT_LT((l1 - l0).norm(), 1e-6 * l0.norm());
  EXPECT_NEAR(0.5 * load.angular_velocity.dot(g.load_inertia * load.angular_velocity), e0, 1e-6 * e0);
}

// Constant world-frame forces at body points are conservative with
// potential -sum f_i . (p + R b_i); with damping off the total energy of
// the load must be preserved by the integrator.
TEST(LoadStep, UndampedEnergyDrift) {
  Gen gen(91);
  for (int trial = 0; trial < 5; ++trial) {
    SystemGeometry g = gen.geometry(4);
    LoadState load;
    load.position = gen.vec3();
    load.velocity = gen.vec3(1.0);
    load.attitude = gen.rotation();
    load.angular_velocity = gen.vec3(3.0);
    const double share = g.load_mass * g.gravity / 4.0;
    std::vector<Vec3> forces;
    const Vec3 tilt = gen.vec3(0.1 * share);
    for (int i = 0; i < 4; ++i) forces.push_back(share * e3() + tilt);
    auto energy = [&](const LoadState& s) {
      double e = 0.5 * g.load_mass * s.velocity.squaredNorm() +
                 0.5 * s.angular_velocity.dot(g.load_inertia * s.angular_velocity) +
                 g.load_mass * g.gravity * s.position.z();
      for (int i = 0; i < 4; ++i) e -= forces[i].dot(s.position + s.attitude * g.attachments[i]);
      return e;
    };
    const double e0 = energy(load);
    const double scale = 0.5 * g.load_mass * load.velocity.squaredNorm() +
                         0.5 * load.angular_velocity.dot(g.load_inertia * load.angular_velocity);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      load = load_step(load, forces, g, LoadDamping{0.0, 0.0}, 1e-3);
      worst = std::max(worst, std::abs(energy(load) - e0));
    }
    EXPECT_LT(worst, 1e-3 * std::max(std::abs(e0), scale));
  }
}

TEST(LoadStep, RejectsStepOutsideRange) {
  const std::vector<Vec3> none(4, Vec3::Zero());
  EXPECT_THROW(load_step(LoadState{}, none, square(), LoadDamping{}, 0.0), Error);
  EXPECT_THROW(load_step(LoadState{}, none, square(), LoadDamping{}, 0.02), Error);
}

TEST(CarrierStep, KinematicFollowsTarget) {
  CarrierModel model;
  model.mode = CarrierModel::Mode::kKinematic;
  const PointMass out = carrier_step({Vec3(1, 2, 3), Vec3::Zero()}, {Vec3(0, 0, 1), Vec3::Zero()}, Vec3(0, 0, -5), model, 0.01, 1e-3);
  EXPECT_EQ(out.position, Vec3(0, 0, 1));
  EXPECT_TRUE(out.velocity.isZero(0.0));
}

TEST(CarrierStep, AtTargetStaysPut) {
  const PointMass c{Vec3(0.1, 0.2, 0.3), Vec3::Zero()};
  const PointMass out = carrier_step(c, {c.position, Vec3::Zero()}, Vec3::Zero(), CarrierModel{}, 0.01, 1e-3);
  EXPECT_EQ(out.position, c.position);
  EXPECT_TRUE(out.velocity.isZero(0.0));
}

// m x'' + c x' + k x = 0 with x(0) = -0.01, x'(0) = 0: underdamped closed
// form.
TEST(CarrierStep, StepResponseMatchesSecondOrderOracle) {
  const double m = 0.01, k = 1000.0, c = 1.5, x0 = -0.01;
  const double wn = std::sqrt(k / m), zeta = c / (2 * std::sqrt(k * m));
  const double wd = wn * std::sqrt(1 - zeta * zeta);
  auto exact = [&](double t) {
    return x0 * std::exp(-zeta * wn * t) * (std::cos(wd * t) + zeta * wn / wd * std::sin(wd * t));
  };
  PointMass p{Vec3(x0, 0, 0), Vec3::Zero()};
  const CarrierTarget target{Vec3::Zero(), Vec3::Zero()};
  double settled_at = -1.0;
  for (int s = 1; s <= 1000; ++s) {
    p = carrier_step(p, target, Vec3::Zero(), CarrierModel{}, m, 1e-3);
    const double t = s * 1e-3;
    EXPECT_NEAR(p.position.x(), exact(t), 1e-5);
    if (std::abs(p.position.x()) >= 1e-3) settled_at = -1.0;
    else if (settled_at < 0.0) settled_at = t;
  }
  ASSERT_GT(settled_at, 0.0);
  EXPECT_LT(settled_at, 0.5);
}

TEST(CarrierStep, ReactionShiftsEquilibrium) {
  PointMass p{Vec3::Zero(), Vec3::Zero()};
  for (int s = 0; s < 2000; ++s) p = carrier_step(p, {Vec3::Zero(), Vec3::Zero()}, Vec3(0, 0, 5), CarrierModel{}, 0.01, 1e-3);
  EXPECT_NEAR(p.position.z(), -5.0 / 1000.0, 1e-9);
}

ScenarioConfig hold_scenario(bool optimizer) {
  ScenarioConfig c;
  c.trajectory.initial_position = Vec3(0, 0, 1);
  c.trajectory.segments = {TrajectorySegment::hold(10.0)};
  c.timing.duration = 10.0;
  c.optimizer.enabled = optimizer;
  return c;
}

TEST(ClosedLoop, StaticHoldStaysAtEquilibrium) {
  for (bool optimizer : {false, true}) {
    const SimTrace trace = run_closed_loop(hold_scenario(optimizer));
    ASSERT_FALSE(trace.aborted) << trace.abort_reason;
    double worst = 0.0;
    for (const auto& r : trace.records) worst = std::max(worst, r.position_error.norm());
    EXPECT_LT(worst, 1e-3) << "optimizer " << optimizer;
  }
}

class ReproductionRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { trace_ = new SimTrace(run_closed_loop(ScenarioConfig{})); }
  static void TearDownTestSuite() { delete trace_; }
  static SimTrace* trace_;
};
SimTrace* ReproductionRun::trace_ = nullptr;

TEST_F(ReproductionRun, CompletesWithUniformSampling) {
  ASSERT_FALSE(trace_->aborted) << trace_->abort_reason;
  ASSERT_EQ(trace_->records.size(), 5001u);
  for (std::size_t k = 0; k < trace_->records.size(); ++k) {
    EXPECT_DOUBLE_EQ(trace_->records[k].t, 0.005 * static_cast<double>(k));
  }
}

TEST_F(ReproductionRun, AttitudeStaysOnSo3AndTensionsNonnegative) {
  for (const auto& r : trace_->records) {
    ASSERT_TRUE(is_rotation(r.load.attitude));
    for (double t : r.tension) ASSERT_GE(t, 0.0);
    for (double t : r.desired_tension) ASSERT_GT(t, 0.0);
  }
}

TEST_F(ReproductionRun, FinalHoldConverges) {
  const auto& last = trace_->records.back();
  EXPECT_LT(last.position_error.norm(), 0.005);
  EXPECT_LT(last.attitude_error.norm(), 0.01);
}

TEST_F(ReproductionRun, BitwiseDeterministic) {
  const SimTrace again = run_closed_loop(ScenarioConfig{});
  ASSERT_EQ(again.records.size(), trace_->records.size());
  for (std::size_t k = 0; k < again.records.size(); ++k) {
    const auto& a = again.records[k];
    const auto& b = trace_->records[k];
    ASSERT_EQ(a.load.position, b.load.position);
    ASSERT_EQ(a.load.attitude, b.load.attitude);
    ASSERT_EQ(a.carrier_position, b.carrier_position);
    ASSERT_EQ(a.desired_velocity, b.desired_velocity);
    ASSERT_EQ(a.x, b.x);
  }
}

TEST(ClosedLoop, LowTensionAbortKeepsTrace) {
  ScenarioConfig c;
  // each cable carries m g / 4 = 2.45 N, below this floor
  c.tension_floor = 3.0;
  const SimTrace trace = run_closed_loop(c);
  ASSERT_TRUE(trace.aborted);
  ASSERT_TRUE(trace.abort_code.has_value());
  EXPECT_EQ(*trace.abort_code, ErrorCode::kLowTension);
  EXPECT_FALSE(trace.abort_reason.empty());
}

TEST(ClosedLoop, InvalidConfigThrows) {
  ScenarioConfig c;
  c.cable.stiffness = -1.0;
  EXPECT_THROW(run_closed_loop(c), Error);
}

TEST(ClosedLoop, KinematicCarriersTrackTargets) {
  ScenarioConfig c = hold_scenario(true);
  c.timing.duration = 2.0;
  c.trajectory.segments = {TrajectorySegment::hold(2.0)};
  c.carrier.mode = CarrierModel::Mode::kKinematic;
  const SimTrace trace = run_closed_loop(c);
  ASSERT_FALSE(trace.aborted) << trace.abort_reason;
  for (std::size_t k = 1; k < trace.records.size(); ++k) {
    const auto& r = trace.records[k];
    const auto& prev = trace.records[k - 1];
    for (int i = 0; i < 4; ++i) {
      const Vec3 held = prev.desired_position[i] + 0.005 * prev.desired_velocity[i];
      EXPECT_LT((r.carrier_position[i] - held).norm(), 1e-12);
    }
  }
}

}  // namespace
}  // namespace nonstop
