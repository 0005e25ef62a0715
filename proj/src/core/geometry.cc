#include "arthro/geometry.h"

#include <algorithm>
#include <cmath>

#include "arthro/error.h"

namespace arthro {
namespace {

constexpr double kRadToDeg = 180.0 / M_PI;

// Renormalize only when the norm has measurably drifted. Normalizing an
// already-unit quaternion can move it by an ulp, which would break the
// parse/write fixed point of the trajectory formats.
Eigen::Quaterniond normalized(const Eigen::Quaterniond& q) {
  const double n2 = q.squaredNorm();
  if (!std::isfinite(n2) || n2 < 1e-300) {
    throw Error(ErrorCategory::kInput, "quaternion has zero or non-finite norm");
  }
  if (std::abs(n2 - 1.0) <= 1e-14) return q;
  const double n = std::sqrt(n2);
  return Eigen::Quaterniond(q.w() / n, q.x() / n, q.y() / n, q.z() / n);
}

}  // namespace

Rotation::Rotation(const Eigen::Quaterniond& q) : q_(normalized(q)) {}

Rotation Rotation::from_wxyz(double w, double x, double y, double z) {
  return Rotation(Eigen::Quaterniond(w, x, y, z));
}

Rotation Rotation::from_axis_angle(const Vec3& axis, double radians) {
  const double n = axis.norm();
  if (n == 0.0) return Rotation();
  return Rotation(Eigen::Quaterniond(Eigen::AngleAxisd(radians, axis / n)));
}

Rotation Rotation::from_rotation_vector(const Vec3& rotation_vector) {
  const double theta = rotation_vector.norm();
  if (theta < 1e-12) {
    // First-order expansion keeps tiny rotations exact to rounding.
    return Rotation(Eigen::Quaterniond(1.0, 0.5 * rotation_vector.x(), 0.5 * rotation_vector.y(),
                                       0.5 * rotation_vector.z()));
  }
  return Rotation(Eigen::Quaterniond(Eigen::AngleAxisd(theta, rotation_vector / theta)));
}

Rotation Rotation::from_matrix(const Mat3& m) { return Rotation(Eigen::Quaterniond(m)); }

double Rotation::angle() const {
  return 2.0 * std::atan2(q_.vec().norm(), std::abs(q_.w()));
}

Vec3 Rotation::rotation_vector() const {
  const Eigen::Quaterniond q = q_.w() < 0.0 ? Eigen::Quaterniond(-q_.coeffs()) : q_;
  const double s = q.vec().norm();
  if (s < 1e-15) return 2.0 * q.vec();
  const double theta = 2.0 * std::atan2(s, q.w());
  return q.vec() * (theta / s);
}

Rotation Rotation::inverse() const { return Rotation(q_.conjugate()); }

Rotation Rotation::operator*(const Rotation& other) const { return Rotation(q_ * other.q_); }

bool same_rotation(const Rotation& a, const Rotation& b, double tol_deg) {
  return geodesic_angle(a, b) <= tol_deg;
}

Rotation slerp(const Rotation& a, const Rotation& b, double fraction) {
  if (fraction <= 0.0) return a;
  if (fraction >= 1.0) return b;
  return Rotation(a.quaternion().slerp(fraction, b.quaternion()));
}

double geodesic_angle(const Rotation& a, const Rotation& b) {
  const Eigen::Quaterniond rel = a.quaternion().conjugate() * b.quaternion();
  return 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w())) * kRadToDeg;
}

RigidTransform RigidTransform::from_matrix(const Mat4& m) {
  return {Rotation::from_matrix(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 1>()};
}

Mat4 RigidTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation.matrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

RigidTransform invert(const RigidTransform& t) {
  const Rotation r_inv = t.rotation.inverse();
  return {r_inv, -(r_inv * t.translation)};
}

Vec3 apply_sim3(const SimilarityTransform& s, const Vec3& p) {
  return s.scale * (s.rotation * p) + s.translation;
}

SimilarityTransform compose(const SimilarityTransform& a, const SimilarityTransform& b) {
  return {a.scale * b.scale, a.rotation * b.rotation,
          a.scale * (a.rotation * b.translation) + a.translation};
}

SimilarityTransform invert(const SimilarityTransform& s) {
  const Rotation r_inv = s.rotation.inverse();
  const double inv_scale = 1.0 / s.scale;
  return {inv_scale, r_inv, -inv_scale * (r_inv * s.translation)};
}

RigidTransform transform_pose(const SimilarityTransform& s, const RigidTransform& pose) {
  return {s.rotation * pose.rotation, apply_sim3(s, pose.translation)};
}

double translation_distance(const RigidTransform& a, const RigidTransform& b) {
  return (a.translation - b.translation).norm();
}

}  // namespace arthro
