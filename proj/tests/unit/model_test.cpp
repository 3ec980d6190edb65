#include "nonstop/model.hpp"

#include <gtest/gtest.h>

#include "nonstop/error.hpp"
#include "support/test_support.hpp"

namespace nonstop {
namespace {

using testing::Gen;

SystemGeometry single_arm() {
  SystemGeometry g = make_polygon_geometry(3, 0.5, 1.0, 1.0, 0.01 * Mat3::Identity(), 0.01);
  g.attachments[0] = Vec3(0.5, 0, 0);
  return g;
}

TEST(Geometry, PolygonIsValid) {
  const SystemGeometry g = make_polygon_geometry(4, 0.3, 0.8, 1.0, 0.01 * Mat3::Identity(), 0.01);
  EXPECT_EQ(g.count(), 4);
  EXPECT_NO_THROW(validate_geometry(g));
  for (const auto& b : g.attachments) EXPECT_NEAR(b.norm(), 0.3, 1e-15);
}

TEST(Geometry, RejectsBrokenInvariants) {
  const Mat3 j = 0.01 * Mat3::Identity();
  SystemGeometry g = make_polygon_geometry(4, 0.3, 0.8, 1.0, j, 0.01);

  SystemGeometry two = g;
  two.attachments.resize(2);
  two.cable_lengths.resize(2);
  two.carrier_masses.resize(2);
  EXPECT_THROW(validate_geometry(two), Error);

  SystemGeometry len = g;
  len.cable_lengths[1] = 0.0;
  EXPECT_THROW(validate_geometry(len), Error);

  SystemGeometry mass = g;
  mass.load_mass = -1.0;
  EXPECT_THROW(validate_geometry(mass), Error);

  SystemGeometry inertia = g;
  inertia.load_inertia(0, 1) = 0.5;
  EXPECT_THROW(validate_geometry(inertia), Error);

  SystemGeometry line = g;
  for (int i = 0; i < 4; ++i) line.attachments[i] = Vec3(0.1 * i, 0, 0);
  try {
    validate_geometry(line);
    FAIL() << "collinear attachments accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
  }
}

TEST(CarrierPosition, DirectSubstitution) {
  const SystemGeometry g = single_arm();
  const LoadState load;
  EXPECT_LT((carrier_position_from_load(load, e3(), g, 0) - Vec3(0.5, 0, 1)).norm(), 1e-15);
  EXPECT_LT((carrier_position_from_load(load, -e3(), g, 0) - Vec3(0.5, 0, -1)).norm(), 1e-15);
}

TEST(CarrierPosition, DistanceIdentity) {
  Gen gen(21);
  for (int k = 0; k < 200; ++k) {
    const SystemGeometry g = gen.geometry(gen.integer(3, 7));
    LoadState load;
    load.position = gen.vec3(3);
    load.attitude = gen.rotation();
    const int i = gen.integer(0, g.count() - 1);
    const Vec3 p = carrier_position_from_load(load, gen.unit(), g, i);
    const double d = (p - load.position - load.attitude * g.attachments[i]).norm();
    EXPECT_NEAR(d, g.cable_lengths[i], 1e-12);
  }
}

TEST(CarrierPosition, RejectsNonUnitDirection) {
  EXPECT_THROW(carrier_position_from_load(LoadState{}, Vec3(0, 0, 2), single_arm(), 0), Error);
}

TEST(CarrierVelocity, StaticIsZero) {
  EXPECT_TRUE(carrier_velocity_from_load(LoadState{}, e3(), Vec3::Zero(), single_arm(), 0).isZero(0.0));
}

TEST(CarrierVelocity, RigidRotation) {
  LoadState load;
  load.angular_velocity = Vec3(0, 0, 1);
  SystemGeometry g = single_arm();
  g.attachments[0] = Vec3(1, 0, 0);
  const Vec3 v = carrier_velocity_from_load(load, e3(), Vec3::Zero(), g, 0);
  EXPECT_LT((v - Vec3(0, 1, 0)).norm(), 1e-15);
}

TEST(CarrierVelocity, MatchesCentralDifferenceOfPosition) {
  Gen gen(22);
  for (int k = 0; k < 100; ++k) {
    const SystemGeometry g = gen.geometry(gen.integer(3, 6));
    const int i = gen.integer(0, g.count() - 1);
    const auto att = testing::SmoothAttitude::random(gen);
    const Vec3 p0 = gen.vec3(2), v0 = gen.vec3(1), a0 = gen.vec3(1);
    // direction q(t) = Rot(axis, c t) q0 keeps unit norm
    const Vec3 q0 = gen.unit(), axis = gen.unit();
    const double c = gen.uniform(-2, 2);
    auto state_at = [&](double t) {
      LoadState s;
      s.position = p0 + v0 * t + 0.5 * a0 * t * t;
      s.velocity = v0 + a0 * t;
      s.attitude = att.at(t);
      s.angular_velocity = att.body_rate(t);
      return s;
    };
    auto q_at = [&](double t) -> Vec3 { return Eigen::AngleAxisd(c * t, axis) * q0; };
    const double t = gen.uniform(0, 2);
    const Vec3 qdot = c * axis.cross(q_at(t));
    const Vec3 fd = testing::central_difference(
        [&](double s) -> Vec3 { return carrier_position_from_load(state_at(s), q_at(s), g, i); }, t, 1e-6);
    const Vec3 v = carrier_velocity_from_load(state_at(t), q_at(t), qdot, g, i);
    EXPECT_LT((v - fd).norm(), 1e-5);
  }
}

TEST(CarrierVelocity, RejectsRateAlongCable) {
  EXPECT_THROW(carrier_velocity_from_load(LoadState{}, e3(), Vec3(0, 0, 0.1), single_arm(), 0), Error);
}

TEST(CableDirection, Examples) {
  const SystemGeometry g = single_arm();
  const LoadState load;
  auto c = cable_direction(Vec3(0.5, 0, 1), load, g, 0);
  EXPECT_LT((c.direction - e3()).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(c.length, 1.0);
  c = cable_direction(Vec3(0.5, 0, 0.82), load, g, 0);
  EXPECT_NEAR(c.direction.norm(), 1.0, 1e-15);
  EXPECT_NEAR(c.length, 0.82, 1e-15);
}

TEST(CableDirection, Degenerate) {
  try {
    cable_direction(Vec3(0.5, 0, 0), LoadState{}, single_arm(), 0);
    FAIL() << "coincident carrier accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateDirection);
  }
}

TEST(CableDirection, IndexOutOfRange) {
  try {
    cable_direction(Vec3(0, 0, 1), LoadState{}, single_arm(), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIndexOutOfRange);
  }
}

TEST(CableDirection, RoundTripWithCarrierPosition) {
  Gen gen(23);
  for (int k = 0; k < 500; ++k) {
    const SystemGeometry g = gen.geometry(gen.integer(3, 8));
    LoadState load;
    load.position = gen.vec3(5);
    load.attitude = gen.rotation();
    const int i = gen.integer(0, g.count() - 1);
    const Vec3 q = gen.unit();
    const Vec3 p = carrier_position_from_load(load, q, g, i);
    const auto c = cable_direction(p, load, g, i);
    EXPECT_NEAR(c.direction.norm(), 1.0, 1e-12);
    EXPECT_LT((c.direction - q).norm(), 1e-10);
    EXPECT_NEAR(c.length, g.cable_lengths[i], 1e-10);
    EXPECT_LT((attachment_position(load, g, i) + c.length * c.direction - p).norm(), 1e-12);
  }
}

}  // namespace
}  // namespace nonstop
