#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace arthro {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Unit-quaternion rotation. The stored quaternion is kept normalized; q and
/// -q describe the same rotation and compare equal under same_rotation().
class Rotation {
 public:
  Rotation() = default;
  explicit Rotation(const Eigen::Quaterniond& q);

  static Rotation from_wxyz(double w, double x, double y, double z);
  static Rotation from_axis_angle(const Vec3& axis, double radians);
  static Rotation from_rotation_vector(const Vec3& rotation_vector);
  static Rotation from_matrix(const Mat3& m);

  const Eigen::Quaterniond& quaternion() const { return q_; }
  Mat3 matrix() const { return q_.toRotationMatrix(); }

  /// Log map; the returned vector has norm in [0, pi].
  Vec3 rotation_vector() const;
  /// Rotation angle in radians, in [0, pi].
  double angle() const;

  Rotation inverse() const;
  Vec3 operator*(const Vec3& p) const { return q_ * p; }
  Rotation operator*(const Rotation& other) const;

 private:
  Eigen::Quaterniond q_ = Eigen::Quaterniond::Identity();
};

bool same_rotation(const Rotation& a, const Rotation& b, double tol_deg);

/// Shortest-arc interpolation; fraction 0 returns a, 1 returns b.
Rotation slerp(const Rotation& a, const Rotation& b, double fraction);

/// Geodesic angle between two rotations in degrees, in [0, 180].
double geodesic_angle(const Rotation& a, const Rotation& b);

/// Rigid motion p -> R p + t. Translations are millimetres.
struct RigidTransform {
  Rotation rotation;
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }
  static RigidTransform from_matrix(const Mat4& m);

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }
  Mat4 matrix() const;
};

RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& t);
inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) { return compose(a, b); }

/// Similarity p -> scale * R p + t.
struct SimilarityTransform {
  double scale = 1.0;
  Rotation rotation;
  Vec3 translation = Vec3::Zero();

  static SimilarityTransform identity() { return {}; }
  static SimilarityTransform from_rigid(const RigidTransform& t) { return {1.0, t.rotation, t.translation}; }

  RigidTransform rigid_part() const { return {rotation, translation}; }
};

Vec3 apply_sim3(const SimilarityTransform& s, const Vec3& p);
SimilarityTransform compose(const SimilarityTransform& a, const SimilarityTransform& b);
SimilarityTransform invert(const SimilarityTransform& s);

/// Carries a camera pose (camera -> frame) through a similarity change of
/// frame: orientation is rotated, position is mapped as a point.
RigidTransform transform_pose(const SimilarityTransform& s, const RigidTransform& pose);

double translation_distance(const RigidTransform& a, const RigidTransform& b);

}  // namespace arthro
