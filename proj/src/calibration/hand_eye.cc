#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "arthro/error.h"
#include "internal.h"

namespace arthro {
namespace {

constexpr double kDegToRad = M_PI / 180.0;

// Left and right quaternion-product matrices in (w, x, y, z) order:
// p * q = left(p) q = right(q) p.
Eigen::Matrix4d left(const Eigen::Quaterniond& q) {
  Eigen::Matrix4d m;
  m << q.w(), -q.x(), -q.y(), -q.z(),
       q.x(), q.w(), -q.z(), q.y(),
       q.y(), q.z(), q.w(), -q.x(),
       q.z(), -q.y(), q.x(), q.w();
  return m;
}

Eigen::Matrix4d right(const Eigen::Quaterniond& q) {
  Eigen::Matrix4d m;
  m << q.w(), -q.x(), -q.y(), -q.z(),
       q.x(), q.w(), q.z(), -q.y(),
       q.y(), -q.z(), q.w(), q.x(),
       q.z(), q.y(), -q.x(), q.w();
  return m;
}

Eigen::Quaterniond positive_w(const Eigen::Quaterniond& q) {
  return q.w() < 0.0 ? Eigen::Quaterniond(-q.coeffs()) : q;
}

}  // namespace

RigidTransform solve_hand_eye(std::span<const HandEyeMotionPair> pairs, const HandEyeOptions& options) {
  if (pairs.size() < 2) {
    throw Error(ErrorCategory::kInsufficientData, "hand-eye calibration needs at least 2 motion pairs",
                {{"pairs", std::to_string(pairs.size())}});
  }

  std::vector<Vec3> axes;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double angle_a = pairs[i].motion_a.rotation.angle();
    const double angle_b = pairs[i].motion_b.rotation.angle();
    if (std::abs(angle_a - angle_b) > options.similar_motion_tolerance_deg * kDegToRad) {
      throw Error(ErrorCategory::kInput,
                  "motion pair " + std::to_string(i) + " rotates by different angles in the two frames",
                  {{"pair", std::to_string(i)},
                   {"angle_a_deg", std::to_string(angle_a / kDegToRad)},
                   {"angle_b_deg", std::to_string(angle_b / kDegToRad)}});
    }
    if (angle_a > 1e-6) axes.push_back(pairs[i].motion_a.rotation.rotation_vector().normalized());
  }
  double widest = 0.0;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    for (std::size_t j = i + 1; j < axes.size(); ++j) {
      const double c = std::min(1.0, std::abs(axes[i].dot(axes[j])));
      widest = std::max(widest, std::acos(c));
    }
  }
  if (widest <= options.min_axis_separation_deg * kDegToRad) {
    throw Error(ErrorCategory::kDegenerateMotion, "motion rotation axes are (nearly) parallel",
                {{"widest_axis_separation_deg", std::to_string(widest / kDegToRad)}});
  }

  // Rotation: q_a * q_x = q_x * q_b for every pair.
  Eigen::MatrixXd m(4 * pairs.size(), 4);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Eigen::Quaterniond qa = positive_w(pairs[i].motion_a.rotation.quaternion());
    const Eigen::Quaterniond qb = positive_w(pairs[i].motion_b.rotation.quaternion());
    m.block<4, 4>(4 * static_cast<Eigen::Index>(i), 0) = left(qa) - right(qb);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::Vector4d qx = svd.matrixV().col(3);
  const Rotation rx = Rotation::from_wxyz(qx(0), qx(1), qx(2), qx(3));

  // Translation: (R_a - I) t_x = R_x t_b - t_a.
  Eigen::MatrixXd a(3 * pairs.size(), 3);
  Eigen::VectorXd b(3 * pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto row = 3 * static_cast<Eigen::Index>(i);
    a.block<3, 3>(row, 0) = pairs[i].motion_a.rotation.matrix() - Mat3::Identity();
    b.segment<3>(row) = rx * pairs[i].motion_b.translation - pairs[i].motion_a.translation;
  }
  const Vec3 tx = a.colPivHouseholderQr().solve(b);
  return {rx, tx};
}

std::vector<HandEyeMotionPair> motion_pairs_from_tracks(const Trajectory& a, const Trajectory& b,
                                                        std::size_t stride, double max_dt,
                                                        double min_rotation_deg) {
  if (stride == 0) {
    throw Error(ErrorCategory::kConfig, "motion pair stride must be positive");
  }
  const auto assoc = associate_by_time(a, b, max_dt);
  std::vector<HandEyeMotionPair> pairs;
  for (std::size_t i = 0; i + stride < assoc.size(); ++i) {
    const RigidTransform motion_a = compose(invert(assoc[i].a), assoc[i + stride].a);
    const RigidTransform motion_b = compose(invert(assoc[i].b), assoc[i + stride].b);
    if (motion_a.rotation.angle() < min_rotation_deg * kDegToRad) continue;
    pairs.push_back({motion_a, motion_b});
  }
  return pairs;
}

}  // namespace arthro
