#include "nonstop/so3.hpp"

#include <gtest/gtest.h>

#include <numbers>

#include "nonstop/error.hpp"
#include "support/test_support.hpp"

namespace nonstop {
namespace {

using testing::Gen;

TEST(Skew, UnitAxesFollowCrossProduct) {
  EXPECT_TRUE((skew(Vec3::UnitX()) * Vec3::UnitY()).isApprox(Vec3::UnitZ()));
  EXPECT_TRUE(skew(Vec3::Zero()).isZero(0.0));
}

TEST(Skew, IsAntisymmetric) {
  const Mat3 s = skew(Vec3(1, 2, 3));
  EXPECT_TRUE((s.transpose() + s).isZero(0.0));
}

TEST(Skew, RandomCrossProducts) {
  Gen g(11);
  for (int k = 0; k < 500; ++k) {
    const Vec3 v = g.vec3(5), w = g.vec3(5);
    EXPECT_LT((skew(v) * w - v.cross(w)).norm(), 1e-13);
    EXPECT_LT((skew(v) * v).norm(), 1e-13);
  }
}

TEST(Vee, InvertsSkew) {
  EXPECT_EQ(vee(skew(Vec3(1, 2, 3))), Vec3(1, 2, 3));
  EXPECT_TRUE(vee(Mat3::Zero()).isZero(0.0));
  Gen g(12);
  for (int k = 0; k < 500; ++k) {
    const Vec3 v = g.vec3(10);
    EXPECT_LT((vee(skew(v)) - v).norm(), 1e-15 * (1.0 + v.norm()));
  }
}

TEST(Vee, MatchesIndexReadOffOfAntisymmetricPart) {
  Gen g(13);
  for (int k = 0; k < 200; ++k) {
    const Mat3 m = g.matx(3, 3, 2.0);
    const Mat3 a = 0.5 * (m - m.transpose());
    const Vec3 expected(a(2, 1), a(0, 2), a(1, 0));
    EXPECT_LT((vee(a) - expected).norm(), 1e-14);
    EXPECT_LT((vee(m) - expected).norm(), 1e-14);
  }
}

TEST(ExpSo3, MatchesTaylorExponential) {
  Gen g(14);
  for (int k = 0; k < 300; ++k) {
    const Vec3 phi = g.vec3(3.0);
    EXPECT_LT((exp_so3(phi) - testing::expm_taylor(skew(phi))).norm(), 1e-12);
  }
  const Vec3 tiny(1e-10, -2e-10, 3e-11);
  EXPECT_LT((exp_so3(tiny) - testing::expm_taylor(skew(tiny))).norm(), 1e-18);
}

TEST(LogSo3, InvertsExpBelowPi) {
  Gen g(15);
  for (int k = 0; k < 300; ++k) {
    Vec3 phi = g.unit() * g.uniform(0.0, 3.0);
    EXPECT_LT((log_so3(exp_so3(phi)) - phi).norm(), 1e-9);
  }
}

TEST(IntegrateRotation, QuarterTurnAboutZ) {
  const Rotation r = integrate_rotation(Rotation::Identity(), Vec3(0, 0, std::numbers::pi / 2), 1.0);
  Mat3 expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  EXPECT_LT((r - expected).norm(), 1e-12);
}

TEST(IntegrateRotation, ZeroRateKeepsAttitude) {
  Gen g(16);
  const Rotation r = g.rotation();
  EXPECT_LT((integrate_rotation(r, Vec3::Zero(), 0.01) - r).norm(), 1e-15);
}

TEST(IntegrateRotation, RejectsNonPositiveStep) {
  EXPECT_THROW(integrate_rotation(Rotation::Identity(), Vec3::UnitX(), 0.0), Error);
  EXPECT_THROW(integrate_rotation(Rotation::Identity(), Vec3::UnitX(), -1e-3), Error);
}

TEST(IntegrateRotation, ForwardDifferenceApproachesRSkewOmega) {
  Gen g(17);
  for (int k = 0; k < 100; ++k) {
    const Rotation r = g.rotation();
    const Vec3 w = g.vec3(2.0);
    const double dt = 1e-4;
    const Mat3 fd = (integrate_rotation(r, w, dt) - r) / dt;
    EXPECT_LT((fd - r * skew(w)).norm(), 10 * dt * (1.0 + w.squaredNorm()));
  }
}

TEST(IntegrateRotation, MillionStepsStayOrthonormal) {
  Rotation r = Rotation::Identity();
  const Vec3 w(0.3, -1.1, 2.7);
  for (int k = 0; k < 1000000; ++k) r = integrate_rotation(r, w, 1e-3);
  EXPECT_LT((r.transpose() * r - Mat3::Identity()).norm(), 1e-7);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-7);
  EXPECT_TRUE(is_rotation(r));
}

TEST(Orthonormalize, ProjectsPerturbedRotation) {
  Gen g(18);
  for (int k = 0; k < 100; ++k) {
    const Rotation r = g.rotation();
    const Rotation p = orthonormalize(r + g.matx(3, 3, 1e-4));
    EXPECT_TRUE(is_rotation(p));
    EXPECT_LT((p - r).norm(), 1e-3);
  }
}

TEST(IsRotation, RejectsReflectionsAndScaling) {
  EXPECT_TRUE(is_rotation(rot_x(0.3) * rot_y(-1.2) * rot_z(2.0)));
  EXPECT_FALSE(is_rotation(Vec3(1, 1, -1).asDiagonal().toDenseMatrix()));
  EXPECT_FALSE(is_rotation(1.001 * Mat3::Identity()));
}

}  // namespace
}  // namespace nonstop
