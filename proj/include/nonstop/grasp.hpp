#pragma once

#include <optional>
#include <vector>

#include "nonstop/model.hpp"

namespace nonstop {

// Relative singular-value threshold below which G is treated as rank
// deficient.
inline constexpr double kSingularityRatio = 1e-8;

// Grasp matrix, its right inverse, an orthonormal nullspace basis and their
// time derivatives at one control instant. Built by AllocationTracker, which
// keeps the nullspace basis continuous across instants.
struct AllocationFrame {
  double t = 0.0;
  MatX grasp;            // G, 6 x 3n
  MatX grasp_pinv;       // G^+, 3n x 6
  MatX nullspace;        // N, 3n x k
  MatX grasp_dot;        // 6 x 3n
  MatX grasp_pinv_dot;   // 3n x 6
  MatX nullspace_dot;    // 3n x k
  bool warm_up = true;   // nullspace_dot is zero because there is no history

  int carriers() const { return static_cast<int>(grasp.cols() / 3); }
  int nullity() const { return static_cast<int>(nullspace.cols()); }
};

// G(R_L) = [I ... I; S(b_1) R^T ... S(b_n) R^T].
MatX grasp_matrix(const Rotation& attitude, const SystemGeometry& geom);

// G^T (G G^T)^-1. Throws kAllocationSingular when sigma_6 / sigma_1 falls
// below kSingularityRatio.
MatX right_pseudoinverse(const MatX& grasp);

// Orthonormal basis of ker(G) from the SVD. When `previous` is given the
// basis is rotated (orthogonal Procrustes) to be closest to it.
MatX nullspace_basis(const MatX& grasp, const std::optional<MatX>& previous = std::nullopt);

// Orthogonal k x k matrix Q minimizing ||raw Q - previous||_F.
MatX procrustes_rotation(const MatX& raw, const MatX& previous);

// Analytic dG/dt given the body angular velocity.
MatX grasp_matrix_dot(const Rotation& attitude, const Vec3& angular_velocity,
                      const SystemGeometry& geom);

// d/dt [G^T (G G^T)^-1].
MatX pseudoinverse_dot(const MatX& grasp, const MatX& grasp_dot);

struct NullspaceRate {
  MatX rate;
  bool warm_up;
};

// Backward difference of aligned bases; zero with warm_up set when there is
// no previous basis.
NullspaceRate nullspace_dot(const MatX& current, const std::optional<MatX>& previous,
                            double dt);

// f_d = G^+ w_d + N lambda.
VecX allocate_forces(const Vec6& wrench, const AllocationFrame& frame, const VecX& lambda);

// Copy of `frame` keeping only the listed nullspace columns (and their
// rates). An empty list keeps all of them.
AllocationFrame restrict_nullspace(const AllocationFrame& frame, const std::vector<int>& columns);

// Reference orientation for the first nullspace basis. Its leading kernel
// plane carries horizontal cable-force patterns that rotate about the load
// (block i proportional to R (cos 2a_i, sin 2a_i, 0) and its quarter turn,
// a_i the azimuth of attachment i), arranged so that equal-amplitude
// sinusoids with the given phases excite only that rotating pattern. For a
// regular polygon the carriers then circle at constant speed and tension.
// Returns nullopt when the pattern has no component in ker(G).
std::optional<MatX> circulating_basis(const Rotation& attitude, const SystemGeometry& geom,
                                      const VecX& phases);

// Sequential frame builder: holds the previous aligned basis. An optional
// seed orients the very first basis.
class AllocationTracker {
 public:
  explicit AllocationTracker(SystemGeometry geom, std::optional<MatX> seed = std::nullopt)
      : geom_(std::move(geom)), seed_(std::move(seed)) {}

  AllocationFrame update(double t, const Rotation& attitude, const Vec3& angular_velocity);

  void reset() { previous_.reset(); }
  const SystemGeometry& geometry() const { return geom_; }

 private:
  SystemGeometry geom_;
  std::optional<MatX> seed_;
  std::optional<AllocationFrame> previous_;
};

}  // namespace nonstop
