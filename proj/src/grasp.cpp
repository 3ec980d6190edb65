#include "nonstop/grasp.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>
#include <string>

#include "nonstop/error.hpp"

namespace nonstop {

namespace {

Eigen::JacobiSVD<MatX> full_svd(const MatX& m) {
  return Eigen::JacobiSVD<MatX>(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

int numerical_rank(const VecX& singular_values) {
  if (singular_values.size() == 0 || singular_values(0) <= 0.0) return 0;
  const double cut = kSingularityRatio * singular_values(0);
  int r = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > cut) ++r;
  }
  return r;
}

[[noreturn]] void throw_singular(const VecX& sv) {
  std::ostringstream os;
  os << "grasp matrix is rank deficient (singular values:";
  for (Eigen::Index i = 0; i < sv.size(); ++i) os << ' ' << sv(i);
  os << "); attachment points or load attitude give no full wrench authority";
  throw Error(ErrorCode::kAllocationSingular, os.str());
}

}  // namespace

MatX grasp_matrix(const Rotation& attitude, const SystemGeometry& geom) {
  const int n = geom.count();
  MatX g = MatX::Zero(6, 3 * n);
  const Mat3 rt = attitude.transpose();
  for (int i = 0; i < n; ++i) {
    g.block<3, 3>(0, 3 * i).setIdentity();
    g.block<3, 3>(3, 3 * i) = skew(geom.attachments[i]) * rt;
  }
  return g;
}

MatX right_pseudoinverse(const MatX& grasp) {
  const Eigen::JacobiSVD<MatX> svd(grasp);
  const VecX& sv = svd.singularValues();
  if (grasp.rows() != 6 || numerical_rank(sv) < 6) throw_singular(sv);
  const MatX ggt = grasp * grasp.transpose();
  return grasp.transpose() * ggt.inverse();
}

MatX procrustes_rotation(const MatX& raw, const MatX& previous) {
  const MatX m = raw.transpose() * previous;
  const Eigen::JacobiSVD<MatX> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

MatX nullspace_basis(const MatX& grasp, const std::optional<MatX>& previous) {
  const auto svd = full_svd(grasp);
  const int r = numerical_rank(svd.singularValues());
  const int k = static_cast<int>(grasp.cols()) - r;
  MatX raw = svd.matrixV().rightCols(k);
  if (!previous) return raw;
  if (previous->rows() != raw.rows() || previous->cols() != k) {
    std::ostringstream os;
    os << "nullspace dimension changed from " << previous->cols() << " to " << k;
    throw Error(ErrorCode::kBasisDimension, os.str());
  }
  return raw * procrustes_rotation(raw, *previous);
}

MatX grasp_matrix_dot(const Rotation& attitude, const Vec3& angular_velocity,
                      const SystemGeometry& geom) {
  const int n = geom.count();
  MatX gd = MatX::Zero(6, 3 * n);
  // d/dt R^T = (R S(w))^T = -S(w) R^T
  const Mat3 rt_dot = -skew(angular_velocity) * attitude.transpose();
  for (int i = 0; i < n; ++i) {
    gd.block<3, 3>(3, 3 * i) = skew(geom.attachments[i]) * rt_dot;
  }
  return gd;
}

MatX pseudoinverse_dot(const MatX& grasp, const MatX& grasp_dot) {
  const Eigen::JacobiSVD<MatX> svd(grasp);
  if (grasp.rows() != 6 || numerical_rank(svd.singularValues()) < 6) {
    throw_singular(svd.singularValues());
  }
  const MatX inv = (grasp * grasp.transpose()).inverse();
  const MatX ggt_dot = grasp_dot * grasp.transpose() + grasp * grasp_dot.transpose();
  return grasp_dot.transpose() * inv - grasp.transpose() * inv * ggt_dot * inv;
}

NullspaceRate nullspace_dot(const MatX& current, const std::optional<MatX>& previous,
                            double dt) {
  if (!previous || !(dt > 0.0)) {
    return {MatX::Zero(current.rows(), current.cols()), true};
  }
  if (previous->rows() != current.rows() || previous->cols() != current.cols()) {
    throw Error(ErrorCode::kBasisDimension, "nullspace_dot: basis dimensions differ between steps");
  }
  return {(current - *previous) / dt, false};
}

VecX allocate_forces(const Vec6& wrench, const AllocationFrame& frame, const VecX& lambda) {
  if (lambda.size() != frame.nullity()) {
    throw Error(ErrorCode::kInvalidArgument, "allocate_forces: lambda size does not match nullity");
  }
  return frame.grasp_pinv * wrench + frame.nullspace * lambda;
}

AllocationFrame restrict_nullspace(const AllocationFrame& frame, const std::vector<int>& columns) {
  if (columns.empty()) return frame;
  AllocationFrame out = frame;
  const Eigen::Index rows = frame.nullspace.rows();
  out.nullspace.resize(rows, static_cast<Eigen::Index>(columns.size()));
  out.nullspace_dot.resize(rows, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const int j = columns[c];
    if (j < 0 || j >= frame.nullity()) {
      throw Error(ErrorCode::kIndexOutOfRange, "nullspace column " + std::to_string(j) + " out of range");
    }
    out.nullspace.col(static_cast<Eigen::Index>(c)) = frame.nullspace.col(j);
    out.nullspace_dot.col(static_cast<Eigen::Index>(c)) = frame.nullspace_dot.col(j);
  }
  return out;
}

namespace {

// Appends the part of `v` orthogonal to the columns already in `basis`
// (first `count` of them) when it is not negligible.
bool append_orthogonal(MatX& basis, int& count, VecX v) {
  for (int pass = 0; pass < 2; ++pass) {
    for (int c = 0; c < count; ++c) v -= basis.col(c).dot(v) * basis.col(c);
  }
  const double norm = v.norm();
  if (norm < 1e-6) return false;
  basis.col(count++) = v / norm;
  return true;
}

}  // namespace

std::optional<MatX> circulating_basis(const Rotation& attitude, const SystemGeometry& geom,
                                      const VecX& phases) {
  const MatX grasp = grasp_matrix(attitude, geom);
  const MatX raw = nullspace_basis(grasp);
  const int k = static_cast<int>(raw.cols());
  const int n = geom.count();
  if (k < 2 || phases.size() != k) return std::nullopt;

  Vec3 centroid = Vec3::Zero();
  for (const auto& b : geom.attachments) centroid += b;
  centroid /= n;
  VecX cos_pattern(3 * n), sin_pattern(3 * n);
  for (int i = 0; i < n; ++i) {
    const Vec3 r = geom.attachments[i] - centroid;
    const double a = 2.0 * std::atan2(r.y(), r.x());
    cos_pattern.segment<3>(3 * i) = attitude * Vec3(std::cos(a), std::sin(a), 0.0);
    sin_pattern.segment<3>(3 * i) = attitude * Vec3(-std::sin(a), std::cos(a), 0.0);
  }
  const MatX kernel_projector = raw * raw.transpose();
  MatX u(3 * n, k);
  int count = 0;
  if (!append_orthogonal(u, count, kernel_projector * cos_pattern) ||
      !append_orthogonal(u, count, kernel_projector * sin_pattern)) {
    return std::nullopt;
  }
  for (int c = 0; c < k && count < k; ++c) append_orthogonal(u, count, raw.col(c));

  MatX w(k, k);
  int wcount = 0;
  if (!append_orthogonal(w, wcount, phases.array().cos().matrix()) ||
      !append_orthogonal(w, wcount, phases.array().sin().matrix())) {
    return std::nullopt;
  }
  for (int c = 0; c < k && wcount < k; ++c) append_orthogonal(w, wcount, VecX::Unit(k, c));
  if (count < k || wcount < k) return std::nullopt;
  return MatX(u * w.transpose());
}

AllocationFrame AllocationTracker::update(double t, const Rotation& attitude,
                                          const Vec3& angular_velocity) {
  AllocationFrame frame;
  frame.t = t;
  frame.grasp = grasp_matrix(attitude, geom_);
  frame.grasp_pinv = right_pseudoinverse(frame.grasp);
  std::optional<MatX> prev_basis;
  if (previous_) prev_basis = previous_->nullspace;
  frame.nullspace = nullspace_basis(frame.grasp, previous_ ? prev_basis : seed_);
  frame.grasp_dot = grasp_matrix_dot(attitude, angular_velocity, geom_);
  frame.grasp_pinv_dot = pseudoinverse_dot(frame.grasp, frame.grasp_dot);
  const double dt = previous_ ? t - previous_->t : 0.0;
  auto rate = nullspace_dot(frame.nullspace, prev_basis, dt);
  frame.nullspace_dot = std::move(rate.rate);
  frame.warm_up = rate.warm_up;
  previous_ = frame;
  return frame;
}

}  // namespace nonstop
