#pragma once

#include <Eigen/Dense>

namespace nonstop {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Attitude is a plain rotation matrix; the SO(3) invariants are enforced by
// the functions that produce one, not by the type.
using Rotation = Eigen::Matrix3d;

inline Vec3 e3() { return Vec3::UnitZ(); }

// S(v): skew(v) * w == v.cross(w).
Mat3 skew(const Vec3& v);

// Inverse of skew. The symmetric part of `m` is discarded.
Vec3 vee(const Mat3& m);

// Exp(S(phi)) by Rodrigues' formula.
Rotation exp_so3(const Vec3& phi);

// Rotation vector of `r` (inverse of exp_so3 for angles below pi).
Vec3 log_so3(const Rotation& r);

// Nearest rotation in the Frobenius sense (SVD projection).
Rotation orthonormalize(const Rotation& r);

// R * Exp(S(omega_body * dt)), projected back onto SO(3).
Rotation integrate_rotation(const Rotation& r, const Vec3& omega_body, double dt);

Rotation rot_x(double angle);
Rotation rot_y(double angle);
Rotation rot_z(double angle);

// ||R^T R - I||_F and |det R - 1| both below `tol`.
bool is_rotation(const Mat3& r, double tol = 1e-9);

}  // namespace nonstop
