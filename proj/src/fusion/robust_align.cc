#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "arthro/error.h"
#include "arthro/fusion.h"
#include "arthro/random.h"

namespace arthro {
namespace {

struct Score {
  std::size_t inliers = 0;
  double sum_sq = 0.0;
};

Score score(const SimilarityTransform& s, std::span<const PointPair> pairs, double threshold,
            std::vector<bool>* mask) {
  Score out;
  const double t2 = threshold * threshold;
  if (mask) mask->assign(pairs.size(), false);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double r2 = (pairs[i].dst - apply_sim3(s, pairs[i].src)).squaredNorm();
    if (r2 <= t2) {
      ++out.inliers;
      out.sum_sq += r2;
      if (mask) (*mask)[i] = true;
    }
  }
  return out;
}

}  // namespace

AlignmentResult robust_align(std::span<const PointPair> pairs, const RobustAlignConfig& cfg) {
  if (pairs.size() < 3) {
    throw Error(ErrorCategory::kInsufficientData, "robust alignment needs at least 3 pairs",
                {{"pairs", std::to_string(pairs.size())}});
  }
  if (!(cfg.inlier_threshold_mm > 0.0)) {
    throw Error(ErrorCategory::kConfig, "inlier threshold must be positive");
  }

  Rng rng(cfg.seed);
  bool have_best = false;
  Score best;
  SimilarityTransform best_transform;
  std::array<Vec3, 3> src;
  std::array<Vec3, 3> dst;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const auto idx = rng.sample(pairs.size(), 3);
    for (int k = 0; k < 3; ++k) {
      src[k] = pairs[idx[k]].src;
      dst[k] = pairs[idx[k]].dst;
    }
    SimilarityTransform hypothesis;
    try {
      hypothesis = umeyama_sim3(src, dst);
    } catch (const Error&) {
      continue;  // collinear minimal sample
    }
    if (!(hypothesis.scale > 0.0) || !std::isfinite(hypothesis.scale)) continue;
    const Score s = score(hypothesis, pairs, cfg.inlier_threshold_mm, nullptr);
    const bool better = !have_best || s.inliers > best.inliers ||
                        (s.inliers == best.inliers && s.inliers > 0 &&
                         s.sum_sq / static_cast<double>(s.inliers) <
                             best.sum_sq / static_cast<double>(best.inliers));
    if (better) {
      have_best = true;
      best = s;
      best_transform = hypothesis;
    }
  }

  if (!have_best || best.inliers < 3) {
    throw Error(ErrorCategory::kNoConsensus, "no alignment hypothesis reached 3 inliers",
                {{"pairs", std::to_string(pairs.size())}});
  }

  AlignmentResult result;
  result.pair_count = pairs.size();
  std::vector<bool> mask;
  score(best_transform, pairs, cfg.inlier_threshold_mm, &mask);
  std::vector<Vec3> in_src;
  std::vector<Vec3> in_dst;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!mask[i]) continue;
    in_src.push_back(pairs[i].src);
    in_dst.push_back(pairs[i].dst);
  }
  try {
    result.transform = umeyama_sim3(in_src, in_dst);
  } catch (const Error&) {
    result.transform = best_transform;
  }

  // Residual statistics over the inliers of the refitted transform.
  const Score final_score = score(result.transform, pairs, cfg.inlier_threshold_mm, &result.inlier_mask);
  if (final_score.inliers < 3) {
    throw Error(ErrorCategory::kNoConsensus, "refit lost its consensus set");
  }
  result.inlier_count = final_score.inliers;
  result.rms_residual = std::sqrt(final_score.sum_sq / static_cast<double>(final_score.inliers));
  return result;
}

}  // namespace arthro
