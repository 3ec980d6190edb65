#include "nonstop/model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nonstop/error.hpp"

namespace nonstop {

namespace {

void check_index(const SystemGeometry& geom, int i) {
  if (i < 0 || i >= geom.count()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "carrier index " + std::to_string(i) + " out of range [0, " +
                    std::to_string(geom.count()) + ")");
  }
}

void fail(const std::string& what) { throw Error(ErrorCode::kValidation, what); }

}  // namespace

void validate_geometry(const SystemGeometry& geom) {
  const int n = geom.count();
  if (n < 3) fail("geometry: at least 3 carriers are required, got " + std::to_string(n));
  if (static_cast<int>(geom.cable_lengths.size()) != n) {
    fail("geometry: cable length count does not match attachment count");
  }
  if (static_cast<int>(geom.carrier_masses.size()) != n) {
    fail("geometry: carrier mass count does not match attachment count");
  }
  for (int i = 0; i < n; ++i) {
    if (!geom.attachments[i].allFinite()) fail("geometry: attachment " + std::to_string(i) + " not finite");
    if (!(geom.cable_lengths[i] > 0.0)) fail("geometry: cable length " + std::to_string(i) + " must be positive");
    if (!(geom.carrier_masses[i] > 0.0)) fail("geometry: carrier mass " + std::to_string(i) + " must be positive");
  }
  if (!(geom.load_mass > 0.0)) fail("geometry: load mass must be positive");
  if (!(geom.gravity >= 0.0)) fail("geometry: gravity must be nonnegative");
  const Mat3& j = geom.load_inertia;
  if (!j.allFinite() || (j - j.transpose()).norm() > 1e-12 * (1.0 + j.norm())) {
    fail("geometry: load inertia must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(j);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) fail("geometry: load inertia must be positive definite");

  // Collinear attachment points make rank(G) < 6.
  const Vec3& b0 = geom.attachments[0];
  double spread = 0.0;
  double scale = 0.0;
  for (int i = 1; i < n; ++i) {
    const Vec3 d1 = geom.attachments[i] - b0;
    scale = std::max(scale, d1.norm());
    for (int j2 = i + 1; j2 < n; ++j2) {
      spread = std::max(spread, d1.cross(geom.attachments[j2] - b0).norm());
    }
  }
  if (!(spread > 1e-9 * std::max(1.0, scale * scale))) {
    fail("geometry: attachment points are collinear");
  }
}

SystemGeometry make_polygon_geometry(int n, double radius, double cable_length,
                                     double load_mass, const Mat3& load_inertia,
                                     double carrier_mass, double gravity) {
  SystemGeometry geom;
  for (int i = 0; i < n; ++i) {
    const double a = std::numbers::pi / n + 2.0 * std::numbers::pi * i / n;
    geom.attachments.emplace_back(radius * std::cos(a), radius * std::sin(a), 0.0);
  }
  geom.cable_lengths.assign(n, cable_length);
  geom.carrier_masses.assign(n, carrier_mass);
  geom.load_mass = load_mass;
  geom.load_inertia = load_inertia;
  geom.gravity = gravity;
  return geom;
}

Vec3 attachment_position(const LoadState& load, const SystemGeometry& geom, int i) {
  check_index(geom, i);
  return load.position + load.attitude * geom.attachments[i];
}

Vec3 attachment_velocity(const LoadState& load, const SystemGeometry& geom, int i) {
  check_index(geom, i);
  return load.velocity + load.attitude * load.angular_velocity.cross(geom.attachments[i]);
}

Vec3 carrier_position_from_load(const LoadState& load, const Vec3& direction,
                                const SystemGeometry& geom, int i) {
  check_index(geom, i);
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "carrier_position_from_load: direction is not unit");
  }
  return attachment_position(load, geom, i) + geom.cable_lengths[i] * direction;
}

Vec3 carrier_velocity_from_load(const LoadState& load, const Vec3& direction,
                                const Vec3& direction_rate,
                                const SystemGeometry& geom, int i) {
  check_index(geom, i);
  if (std::abs(direction.dot(direction_rate)) > 1e-8 * std::max(1.0, direction_rate.norm())) {
    throw Error(ErrorCode::kInvalidArgument,
                "carrier_velocity_from_load: direction rate is not orthogonal to the direction");
  }
  return attachment_velocity(load, geom, i) + geom.cable_lengths[i] * direction_rate;
}

CableDirection cable_direction(const Vec3& carrier_pos, const LoadState& load,
                               const SystemGeometry& geom, int i) {
  const Vec3 d = carrier_pos - attachment_position(load, geom, i);
  const double len = d.norm();
  if (!(len > kDegenerateDistance)) {
    throw Error(ErrorCode::kDegenerateDirection,
                "carrier " + std::to_string(i) + " coincides with its attachment point");
  }
  return {d / len, len};
}

}  // namespace nonstop
