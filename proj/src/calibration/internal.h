#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "arthro/calibration.h"

namespace arthro::detail {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// project() without the exception: nullopt for points at or behind z = 0.
inline std::optional<Vec2> try_project(const PinholeCamera& cam, const Vec3& p) {
  if (!(p.z() > 0.0)) return std::nullopt;
  const Vec2 d = distort(cam, Vec2(p.x() / p.z(), p.y() / p.z()));
  return Vec2(cam.fx * d.x() + cam.cx, cam.fy * d.y() + cam.cy);
}

/// Pose parameters: rotation vector followed by translation.
inline RigidTransform pose_from_params(const double* p) {
  return {Rotation::from_rotation_vector(Vec3(p[0], p[1], p[2])), Vec3(p[3], p[4], p[5])};
}

inline void pose_to_params(const RigidTransform& t, double* p) {
  const Vec3 r = t.rotation.rotation_vector();
  for (int i = 0; i < 3; ++i) {
    p[i] = r(i);
    p[3 + i] = t.translation(i);
  }
}

/// Target pose from a plane -> normalized-image homography (K already removed).
RigidTransform pose_from_homography(const Mat3& h_normalized);

struct LeastSquaresProblem {
  // Returns false if the parameters are infeasible (e.g. a point behind the camera).
  std::function<bool(const VecX& x, VecX& residuals)> residuals;
  std::function<void(const VecX& x, MatX& jacobian)> jacobian;
};

struct LmSummary {
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
};

/// Levenberg-Marquardt with Marquardt diagonal scaling. Stops on relative cost
/// change below options.relative_tolerance or after options.max_iterations.
LmSummary levenberg_marquardt(const LeastSquaresProblem& problem, VecX& x, const RefinementOptions& options);

/// Central-difference derivative step for parameter value v.
inline double diff_step(double v) { return 1e-6 * std::max(1.0, std::abs(v)); }

}  // namespace arthro::detail
