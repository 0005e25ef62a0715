#include <cmath>
#include <limits>

#include "arthro/error.h"
#include "arthro/fusion.h"
#include "arthro/metrics.h"
#include "kdtree.h"

namespace arthro {
namespace {

void require_points(const PointCloud& c, const char* name) {
  if (c.empty()) {
    throw Error(ErrorCategory::kInput, std::string(name) + " point cloud is empty");
  }
}

double max_nn_squared(const PointCloud& from, const detail::KdTree& to) {
  double worst = 0.0;
  for (const Vec3& p : from.points) worst = std::max(worst, to.nearest(p).squared_distance);
  return worst;
}

RigidTransform fit_rigid(std::span<const Vec3> src, std::span<const Vec3> dst) {
  try {
    return umeyama_rigid(src, dst);
  } catch (const Error&) {
    Vec3 shift = Vec3::Zero();
    for (std::size_t i = 0; i < src.size(); ++i) shift += dst[i] - src[i];
    return {Rotation(), shift / static_cast<double>(src.size())};
  }
}

}  // namespace

double nn_rmse(const PointCloud& src, const PointCloud& ref) {
  require_points(src, "source");
  require_points(ref, "reference");
  const detail::KdTree tree(ref.points);
  double sum = 0.0;
  for (const Vec3& p : src.points) sum += tree.nearest(p).squared_distance;
  return std::sqrt(sum / static_cast<double>(src.size()));
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
  require_points(a, "first");
  require_points(b, "second");
  const detail::KdTree tree_a(a.points);
  const detail::KdTree tree_b(b.points);
  return std::sqrt(std::max(max_nn_squared(a, tree_b), max_nn_squared(b, tree_a)));
}

IcpResult icp_rigid(const PointCloud& src, const PointCloud& dst, const IcpConfig& cfg) {
  require_points(src, "source");
  require_points(dst, "target");
  const detail::KdTree tree(dst.points);
  IcpResult result;
  result.transform = cfg.init;
  std::vector<Vec3> matched(src.size());
  double previous = std::numeric_limits<double>::infinity();

  auto match = [&](const RigidTransform& t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      const auto hit = tree.nearest(t * src.points[i]);
      matched[i] = dst.points[hit.index];
      sum += hit.squared_distance;
    }
    return std::sqrt(sum / static_cast<double>(src.size()));
  };

  for (int it = 0; it < cfg.max_iterations; ++it) {
    const double rms = match(result.transform);
    result.iterations = it + 1;
    result.rms_residual = rms;
    if (rms == 0.0 || std::abs(previous - rms) < cfg.tolerance_mm) {
      result.converged = true;
      break;
    }
    previous = rms;
    result.transform = fit_rigid(src.points, matched);
  }
  if (!result.converged) result.rms_residual = match(result.transform);
  return result;
}

}  // namespace arthro
