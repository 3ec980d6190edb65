#include "nonstop/so3.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "nonstop/error.hpp"

namespace nonstop {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) {
  return 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

Rotation exp_so3(const Vec3& phi) {
  const double angle = phi.norm();
  const Mat3 k = skew(phi);
  if (angle < 1e-8) {
    // Second-order series; exact to rounding at this size.
    return Mat3::Identity() + k + 0.5 * k * k;
  }
  const double a = std::sin(angle) / angle;
  const double b = (1.0 - std::cos(angle)) / (angle * angle);
  return Mat3::Identity() + a * k + b * k * k;
}

Vec3 log_so3(const Rotation& r) {
  const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
  const double angle = std::acos(c);
  const Vec3 w = vee(r);  // sin(angle) * axis
  if (angle < 1e-8) return w;
  return (angle / std::sin(angle)) * w;
}

Rotation orthonormalize(const Rotation& r) {
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

Rotation integrate_rotation(const Rotation& r, const Vec3& omega_body, double dt) {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "integrate_rotation: dt must be positive");
  }
  return orthonormalize(r * exp_so3(omega_body * dt));
}

Rotation rot_x(double angle) { return exp_so3(Vec3::UnitX() * angle); }
Rotation rot_y(double angle) { return exp_so3(Vec3::UnitY() * angle); }
Rotation rot_z(double angle) { return exp_so3(Vec3::UnitZ() * angle); }

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  const double ortho = (r.transpose() * r - Mat3::Identity()).norm();
  return ortho < tol && std::abs(r.determinant() - 1.0) < tol;
}

}  // namespace nonstop
