#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <string>

#include "arthro/error.h"
#include "arthro/fusion.h"

namespace arthro {
namespace {

struct Alignment {
  double scale;
  Mat3 rotation;
  Vec3 translation;
};

Alignment umeyama(std::span<const Vec3> src, std::span<const Vec3> dst, bool with_scale) {
  if (src.size() != dst.size()) {
    throw Error(ErrorCategory::kInput, "point counts differ",
                {{"src", std::to_string(src.size())}, {"dst", std::to_string(dst.size())}});
  }
  const std::size_t n = src.size();
  if (n < 3) {
    throw Error(ErrorCategory::kInput, "at least 3 point pairs are required");
  }

  Vec3 mu_src = Vec3::Zero();
  Vec3 mu_dst = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mu_src += src[i];
    mu_dst += dst[i];
  }
  mu_src /= static_cast<double>(n);
  mu_dst /= static_cast<double>(n);

  Mat3 cov = Mat3::Zero();
  Mat3 src_scatter = Mat3::Zero();
  double src_var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 a = src[i] - mu_src;
    const Vec3 b = dst[i] - mu_dst;
    cov += b * a.transpose();
    src_scatter += a * a.transpose();
    src_var += a.squaredNorm();
  }
  cov /= static_cast<double>(n);
  src_scatter /= static_cast<double>(n);
  src_var /= static_cast<double>(n);

  // Rank of the source spread: collinear or coincident points leave the
  // rotation about the line undetermined.
  const Eigen::SelfAdjointEigenSolver<Mat3> spread(src_scatter);
  const double largest = spread.eigenvalues()(2);
  if (!(largest > 0.0) || spread.eigenvalues()(1) <= 1e-12 * largest) {
    throw Error(ErrorCategory::kDegenerateGeometry, "source points are collinear or coincident");
  }

  const Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Vec3 sign = Vec3::Ones();
  if (u.determinant() * v.determinant() < 0.0) sign(2) = -1.0;

  Alignment out;
  out.rotation = u * sign.asDiagonal() * v.transpose();
  out.scale = with_scale ? svd.singularValues().dot(sign) / src_var : 1.0;
  out.translation = mu_dst - out.scale * out.rotation * mu_src;
  return out;
}

}  // namespace

SimilarityTransform umeyama_sim3(std::span<const Vec3> src, std::span<const Vec3> dst) {
  const Alignment a = umeyama(src, dst, true);
  return {a.scale, Rotation::from_matrix(a.rotation), a.translation};
}

RigidTransform umeyama_rigid(std::span<const Vec3> src, std::span<const Vec3> dst) {
  const Alignment a = umeyama(src, dst, false);
  return {Rotation::from_matrix(a.rotation), a.translation};
}

}  // namespace arthro
