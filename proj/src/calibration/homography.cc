#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "arthro/error.h"
#include "internal.h"

namespace arthro {
namespace {

// Similarity moving the centroid to the origin with mean distance sqrt(2).
Mat3 normalizer(std::span<const Vec2> pts) {
  Vec2 mean = Vec2::Zero();
  for (const Vec2& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  double dist = 0.0;
  for (const Vec2& p : pts) dist += (p - mean).norm();
  dist /= static_cast<double>(pts.size());
  const double s = dist > 0.0 ? std::sqrt(2.0) / dist : 1.0;
  Mat3 t;
  t << s, 0, -s * mean.x(), 0, s, -s * mean.y(), 0, 0, 1;
  return t;
}

bool collinear(std::span<const Vec2> pts) {
  Vec2 mean = Vec2::Zero();
  for (const Vec2& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const Vec2& p : pts) cov += (p - mean) * (p - mean).transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  return !(es.eigenvalues()(1) > 0.0) || es.eigenvalues()(0) <= 1e-10 * es.eigenvalues()(1);
}

}  // namespace

Mat3 estimate_homography(std::span<const Vec2> plane, std::span<const Vec2> image,
                         const std::string& view_id) {
  if (plane.size() != image.size()) {
    throw Error(ErrorCategory::kInput, "homography point counts differ", {{"view", view_id}});
  }
  if (plane.size() < 4) {
    throw Error(ErrorCategory::kDegenerateView, "view '" + view_id + "' has fewer than 4 correspondences",
                {{"view", view_id}});
  }
  if (collinear(plane) || collinear(image)) {
    throw Error(ErrorCategory::kDegenerateView, "view '" + view_id + "' has collinear corners",
                {{"view", view_id}});
  }
  const Mat3 tp = normalizer(plane);
  const Mat3 ti = normalizer(image);
  const std::size_t n = plane.size();
  Eigen::MatrixXd a(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 p = tp * plane[i].homogeneous();
    const Vec3 q = ti * image[i].homogeneous();
    const double x = p.x(), y = p.y(), u = q.x(), v = q.y();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(7) <= 1e-10 * sv(0)) {
    throw Error(ErrorCategory::kDegenerateView, "view '" + view_id + "' homography is rank deficient",
                {{"view", view_id}});
  }
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Mat3 hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  Mat3 out = ti.inverse() * hn * tp;
  return out / out(2, 2);
}

namespace detail {

RigidTransform pose_from_homography(const Mat3& h) {
  const double lambda = 1.0 / h.col(0).norm();
  Vec3 r1 = lambda * h.col(0);
  Vec3 r2 = lambda * h.col(1);
  Vec3 t = lambda * h.col(2);
  if (t.z() < 0.0) {
    r1 = -r1;
    r2 = -r2;
    t = -t;
  }
  Mat3 r;
  r.col(0) = r1;
  r.col(1) = r2;
  r.col(2) = r1.cross(r2);
  const Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 rot = svd.matrixU() * svd.matrixV().transpose();
  if (rot.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    rot = u * svd.matrixV().transpose();
  }
  return {Rotation::from_matrix(rot), t};
}

LmSummary levenberg_marquardt(const LeastSquaresProblem& problem, VecX& x, const RefinementOptions& options) {
  LmSummary summary;
  VecX r;
  if (!problem.residuals(x, r)) {
    throw Error(ErrorCategory::kBehindCamera, "initial estimate places points behind the camera");
  }
  double cost = r.squaredNorm();
  summary.initial_cost = cost;
  double lambda = options.initial_damping;
  MatX j;
  bool need_jacobian = true;
  MatX jtj;
  VecX jtr;
  VecX r_new;
  for (int it = 0; it < options.max_iterations && cost > 0.0; ++it) {
    summary.iterations = it + 1;
    if (need_jacobian) {
      problem.jacobian(x, j);
      jtj = j.transpose() * j;
      jtr = j.transpose() * r;
      need_jacobian = false;
    }
    MatX lhs = jtj;
    for (Eigen::Index k = 0; k < lhs.rows(); ++k) {
      lhs(k, k) += lambda * std::max(jtj(k, k), 1e-12);
    }
    const VecX delta = lhs.ldlt().solve(-jtr);
    const VecX candidate = x + delta;
    const bool feasible = delta.allFinite() && problem.residuals(candidate, r_new);
    const double new_cost = feasible ? r_new.squaredNorm() : std::numeric_limits<double>::infinity();
    if (new_cost < cost) {
      const double rel = (cost - new_cost) / cost;
      x = candidate;
      r = r_new;
      cost = new_cost;
      lambda /= options.damping_factor;
      need_jacobian = true;
      if (rel < options.relative_tolerance) break;
    } else {
      lambda *= options.damping_factor;
      if (lambda > 1e32) break;
    }
  }
  summary.final_cost = cost;
  return summary;
}

}  // namespace detail
}  // namespace arthro
