#include <cmath>
#include <string>

#include "arthro/error.h"
#include "arthro/fusion.h"
#include "arthro/metrics.h"

namespace arthro {
namespace {

void finish(TrajError& err) {
  double t2 = 0.0;
  double r2 = 0.0;
  for (const auto& s : err.per_sample) {
    t2 += s.trans_err_mm * s.trans_err_mm;
    r2 += s.rot_err_deg * s.rot_err_deg;
  }
  const double n = static_cast<double>(err.per_sample.size());
  err.trans_rmse = std::sqrt(t2 / n);
  err.rot_rmse = std::sqrt(r2 / n);
}

// Positions of a straight-line trajectory leave the rotation about the line
// free; fall back to matching centroids (and spread, for similarity).
SimilarityTransform centroid_alignment(std::span<const Vec3> src, std::span<const Vec3> dst, bool with_scale) {
  Vec3 ms = Vec3::Zero(), md = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    ms += src[i];
    md += dst[i];
  }
  ms /= static_cast<double>(src.size());
  md /= static_cast<double>(src.size());
  double scale = 1.0;
  if (with_scale) {
    double vs = 0.0, vd = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      vs += (src[i] - ms).squaredNorm();
      vd += (dst[i] - md).squaredNorm();
    }
    if (vs > 0.0 && vd > 0.0) scale = std::sqrt(vd / vs);
  }
  return {scale, Rotation(), md - scale * ms};
}

}  // namespace

TrajError ate(const Trajectory& est, const Trajectory& gt, AteAlignment mode, double max_dt) {
  const auto assoc = associate_by_time(est, gt, max_dt);
  if (assoc.size() < 2) {
    throw Error(ErrorCategory::kNoOverlap, "ATE needs at least 2 associated samples",
                {{"associated", std::to_string(assoc.size())}});
  }

  SimilarityTransform align;
  if (mode != AteAlignment::kNone) {
    std::vector<Vec3> src, dst;
    src.reserve(assoc.size());
    dst.reserve(assoc.size());
    for (const auto& a : assoc) {
      src.push_back(a.a.translation);
      dst.push_back(a.b.translation);
    }
    const bool with_scale = mode == AteAlignment::kSimilarity;
    try {
      align = with_scale ? umeyama_sim3(src, dst) : SimilarityTransform::from_rigid(umeyama_rigid(src, dst));
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::kDegenerateGeometry && e.category() != ErrorCategory::kInput) throw;
      align = centroid_alignment(src, dst, with_scale);
    }
  }

  TrajError err;
  err.per_sample.reserve(assoc.size());
  for (const auto& a : assoc) {
    const RigidTransform aligned = mode == AteAlignment::kNone ? a.a : transform_pose(align, a.a);
    err.per_sample.push_back({a.timestamp, (aligned.translation - a.b.translation).norm(),
                              geodesic_angle(aligned.rotation, a.b.rotation)});
  }
  finish(err);
  return err;
}

TrajError rte(const Trajectory& est, const Trajectory& gt, std::size_t delta, double max_dt) {
  if (delta == 0) {
    throw Error(ErrorCategory::kConfig, "RTE step must be positive");
  }
  const auto assoc = associate_by_time(est, gt, max_dt);
  if (assoc.size() < delta + 1) {
    throw Error(ErrorCategory::kInsufficientData, "RTE needs more than delta associated samples",
                {{"associated", std::to_string(assoc.size())}, {"delta", std::to_string(delta)}});
  }
  TrajError err;
  err.per_sample.reserve(assoc.size() - delta);
  for (std::size_t i = 0; i + delta < assoc.size(); ++i) {
    const RigidTransform gt_rel = compose(invert(assoc[i].b), assoc[i + delta].b);
    const RigidTransform est_rel = compose(invert(assoc[i].a), assoc[i + delta].a);
    const RigidTransform e = compose(invert(gt_rel), est_rel);
    err.per_sample.push_back({assoc[i].timestamp, e.translation.norm(), e.rotation.angle() * 180.0 / M_PI});
  }
  finish(err);
  return err;
}

}  // namespace arthro
