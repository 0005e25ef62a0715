#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "arthro/error.h"
#include "internal.h"

namespace arthro {

using detail::MatX;
using detail::VecX;

namespace {

constexpr int kIntrinsicParams = 6;  // fx, fy, cx, cy, k1, k2
constexpr int kPoseParams = 6;

void check_observation(const PlanarTarget& target, const CalibrationObservation& obs) {
  if (obs.image_points.size() != target.corner_count()) {
    throw Error(ErrorCategory::kInput,
                "view '" + obs.view_id + "' has " + std::to_string(obs.image_points.size()) +
                    " points, target has " + std::to_string(target.corner_count()),
                {{"view", obs.view_id}});
  }
}

std::vector<Vec2> plane_points(const PlanarTarget& target) {
  std::vector<Vec2> out;
  out.reserve(target.corner_count());
  for (const Vec3& c : target.corners()) out.emplace_back(c.x(), c.y());
  return out;
}

PinholeCamera camera_from_params(const double* p, int width, int height) {
  PinholeCamera cam;
  cam.fx = p[0];
  cam.fy = p[1];
  cam.cx = p[2];
  cam.cy = p[3];
  cam.k1 = p[4];
  cam.k2 = p[5];
  cam.width = width;
  cam.height = height;
  return cam;
}

// Writes the 2N residuals of one view; false if any corner is behind the camera.
bool view_residuals(const PinholeCamera& cam, const RigidTransform& pose, const PlanarTarget& target,
                    const CalibrationObservation& obs, double* out) {
  const auto corners = target.corners();
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const auto px = detail::try_project(cam, pose * corners[i]);
    if (!px) return false;
    out[2 * i] = px->x() - obs.image_points[i].x();
    out[2 * i + 1] = px->y() - obs.image_points[i].y();
  }
  return true;
}

// v_ij row of the absolute-conic constraint for homography columns i, j.
Eigen::Matrix<double, 1, 6> conic_row(const Mat3& h, int i, int j) {
  Eigen::Matrix<double, 1, 6> v;
  v << h(0, i) * h(0, j), h(0, i) * h(1, j) + h(1, i) * h(0, j), h(1, i) * h(1, j),
      h(2, i) * h(0, j) + h(0, i) * h(2, j), h(2, i) * h(1, j) + h(1, i) * h(2, j), h(2, i) * h(2, j);
  return v;
}

// Closed-form K from homographies with zero skew enforced. Homographies are
// first expressed in a normalized pixel frame for conditioning.
Mat3 initial_intrinsics(std::span<const Mat3> homographies, int width, int height) {
  const double s = 2.0 / (width + height);
  Mat3 n;
  n << s, 0, -0.5 * s * width, 0, s, -0.5 * s * height, 0, 0, 1;

  const std::size_t views = homographies.size();
  MatX v(2 * views + 1, 6);
  for (std::size_t k = 0; k < views; ++k) {
    Mat3 h = n * homographies[k];
    h /= h.norm();
    v.row(2 * k) = conic_row(h, 0, 1);
    v.row(2 * k + 1) = conic_row(h, 0, 0) - conic_row(h, 1, 1);
  }
  const double weight = v.topRows(2 * views).norm() / std::sqrt(static_cast<double>(2 * views));
  v.row(2 * views) << 0, weight, 0, 0, 0, 0;  // B12 = 0 <=> zero skew

  const Eigen::JacobiSVD<MatX> svd(v, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(4) <= 1e-10 * sv(0)) {
    throw Error(ErrorCategory::kDegenerateGeometry,
                "views do not constrain the intrinsics (parallel target planes?)");
  }
  Eigen::Matrix<double, 6, 1> b = svd.matrixV().col(5);
  if (b(0) < 0.0) b = -b;
  const double b11 = b(0), b12 = b(1), b22 = b(2), b13 = b(3), b23 = b(4), b33 = b(5);
  const double den = b11 * b22 - b12 * b12;
  const double v0 = (b12 * b13 - b11 * b23) / den;
  const double lambda = b33 - (b13 * b13 + v0 * (b12 * b13 - b11 * b23)) / b11;
  const double alpha2 = lambda / b11;
  const double beta2 = lambda * b11 / den;
  if (!(den > 0.0) || !(alpha2 > 0.0) || !(beta2 > 0.0)) {
    throw Error(ErrorCategory::kDegenerateGeometry, "closed-form intrinsics are not physical");
  }
  const double alpha = std::sqrt(alpha2);
  const double beta = std::sqrt(beta2);
  const double u0 = -b13 * alpha2 / lambda;
  Mat3 k_norm;
  k_norm << alpha, 0, u0, 0, beta, v0, 0, 0, 1;
  return n.inverse() * k_norm;
}

}  // namespace

double reprojection_error(const PinholeCamera& cam, const RigidTransform& target_to_camera,
                          const PlanarTarget& target, const CalibrationObservation& obs) {
  check_observation(target, obs);
  const auto corners = target.corners();
  double sum = 0.0;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const Vec2 px = project(cam, target_to_camera * corners[i]);
    sum += (px - obs.image_points[i]).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(corners.size()));
}

RigidTransform estimate_view_pose(const PinholeCamera& cam, const PlanarTarget& target,
                                  const CalibrationObservation& obs, const RefinementOptions& options) {
  check_observation(target, obs);
  std::vector<Vec2> normalized;
  normalized.reserve(obs.image_points.size());
  for (const Vec2& px : obs.image_points) normalized.push_back(undistort_pixel(cam, px));
  const Mat3 h = estimate_homography(plane_points(target), normalized, obs.view_id);
  const RigidTransform initial = detail::pose_from_homography(h);

  VecX x(kPoseParams);
  detail::pose_to_params(initial, x.data());
  const Eigen::Index m = static_cast<Eigen::Index>(2 * target.corner_count());
  detail::LeastSquaresProblem problem;
  problem.residuals = [&](const VecX& p, VecX& r) {
    r.resize(m);
    return view_residuals(cam, detail::pose_from_params(p.data()), target, obs, r.data());
  };
  problem.jacobian = [&](const VecX& p, MatX& j) {
    j.resize(m, kPoseParams);
    VecX plus(m), minus(m);
    for (int k = 0; k < kPoseParams; ++k) {
      VecX xp = p, xm = p;
      const double h = detail::diff_step(p(k));
      xp(k) += h;
      xm(k) -= h;
      view_residuals(cam, detail::pose_from_params(xp.data()), target, obs, plus.data());
      view_residuals(cam, detail::pose_from_params(xm.data()), target, obs, minus.data());
      j.col(k) = (plus - minus) / (2.0 * h);
    }
  };
  detail::levenberg_marquardt(problem, x, options);
  return detail::pose_from_params(x.data());
}

CalibrationResult estimate_intrinsics(const PlanarTarget& target,
                                      std::span<const CalibrationObservation> views, int width,
                                      int height, const RefinementOptions& options) {
  if (views.size() < 3) {
    throw Error(ErrorCategory::kInsufficientData, "intrinsic calibration needs at least 3 views",
                {{"views", std::to_string(views.size())}});
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCategory::kInput, "image size must be positive");
  }
  for (const auto& v : views) check_observation(target, v);

  const std::vector<Vec2> plane = plane_points(target);
  std::vector<Mat3> homographies;
  homographies.reserve(views.size());
  for (const auto& v : views) homographies.push_back(estimate_homography(plane, v.image_points, v.view_id));

  const Mat3 k = initial_intrinsics(homographies, width, height);
  const Mat3 k_inv = k.inverse();

  const std::size_t nv = views.size();
  VecX x(kIntrinsicParams + kPoseParams * static_cast<Eigen::Index>(nv));
  x.head<kIntrinsicParams>() << k(0, 0), k(1, 1), k(0, 2), k(1, 2), 0.0, 0.0;
  for (std::size_t i = 0; i < nv; ++i) {
    const RigidTransform pose = detail::pose_from_homography(k_inv * homographies[i]);
    detail::pose_to_params(pose, x.data() + kIntrinsicParams + kPoseParams * i);
  }

  const Eigen::Index per_view = static_cast<Eigen::Index>(2 * target.corner_count());
  const Eigen::Index m = per_view * static_cast<Eigen::Index>(nv);
  auto residuals_of_view = [&](const VecX& p, std::size_t i, double* out) {
    const PinholeCamera cam = camera_from_params(p.data(), width, height);
    const RigidTransform pose = detail::pose_from_params(p.data() + kIntrinsicParams + kPoseParams * i);
    return view_residuals(cam, pose, target, views[i], out);
  };

  detail::LeastSquaresProblem problem;
  problem.residuals = [&](const VecX& p, VecX& r) {
    r.resize(m);
    for (std::size_t i = 0; i < nv; ++i) {
      if (!residuals_of_view(p, i, r.data() + per_view * static_cast<Eigen::Index>(i))) return false;
    }
    return true;
  };
  // Each view's residuals depend only on the shared intrinsics and that
  // view's own pose, so the Jacobian is filled block by block.
  problem.jacobian = [&](const VecX& p, MatX& j) {
    j.setZero(m, p.size());
    VecX plus(per_view), minus(per_view);
    for (std::size_t i = 0; i < nv; ++i) {
      const Eigen::Index row = per_view * static_cast<Eigen::Index>(i);
      const Eigen::Index pose_col = kIntrinsicParams + kPoseParams * static_cast<Eigen::Index>(i);
      for (Eigen::Index c = 0; c < kIntrinsicParams + kPoseParams; ++c) {
        const Eigen::Index col = c < kIntrinsicParams ? c : pose_col + (c - kIntrinsicParams);
        VecX xp = p, xm = p;
        const double h = detail::diff_step(p(col));
        xp(col) += h;
        xm(col) -= h;
        residuals_of_view(xp, i, plus.data());
        residuals_of_view(xm, i, minus.data());
        j.block(row, col, per_view, 1) = (plus - minus) / (2.0 * h);
      }
    }
  };
  detail::levenberg_marquardt(problem, x, options);

  CalibrationResult result;
  result.camera = camera_from_params(x.data(), width, height);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < nv; ++i) {
    const RigidTransform pose = detail::pose_from_params(x.data() + kIntrinsicParams + kPoseParams * i);
    result.per_view_poses.push_back({views[i].view_id, pose});
    result.inlier_views.push_back(views[i].view_id);
    const double rpe = reprojection_error(result.camera, pose, target, views[i]);
    sum_sq += rpe * rpe;
  }
  result.rpe_pixels = std::sqrt(sum_sq / static_cast<double>(nv));
  return result;
}

}  // namespace arthro
