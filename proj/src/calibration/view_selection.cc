#include <algorithm>
#include <atomic>
#include <limits>
#include <optional>
#include <string>
#include <thread>

#include "arthro/error.h"
#include "arthro/random.h"
#include "internal.h"

namespace arthro {
namespace {

struct HypothesisScore {
  bool valid = false;
  std::vector<bool> inliers;
  std::size_t inlier_count = 0;
  double mean_inlier_rpe = std::numeric_limits<double>::infinity();
};

HypothesisScore evaluate_hypothesis(const PlanarTarget& target,
                                    std::span<const CalibrationObservation> views, int width,
                                    int height, const ViewSelectionConfig& cfg, std::size_t index) {
  HypothesisScore score;
  Rng rng = Rng::derive(cfg.seed, index);
  const auto subset_idx = rng.sample(views.size(), cfg.min_sample);
  std::vector<CalibrationObservation> subset;
  subset.reserve(subset_idx.size());
  for (const std::size_t i : subset_idx) subset.push_back(views[i]);

  CalibrationResult hypothesis;
  try {
    hypothesis = estimate_intrinsics(target, subset, width, height, cfg.refinement);
  } catch (const Error&) {
    return score;
  }
  score.valid = true;
  score.inliers.assign(views.size(), false);
  double rpe_sum = 0.0;
  for (std::size_t i = 0; i < views.size(); ++i) {
    try {
      const RigidTransform pose = estimate_view_pose(hypothesis.camera, target, views[i], cfg.refinement);
      const double rpe = reprojection_error(hypothesis.camera, pose, target, views[i]);
      if (rpe < cfg.inlier_rpe_threshold) {
        score.inliers[i] = true;
        ++score.inlier_count;
        rpe_sum += rpe;
      }
    } catch (const Error&) {
      // A view the hypothesis cannot explain is an outlier.
    }
  }
  if (score.inlier_count > 0) score.mean_inlier_rpe = rpe_sum / static_cast<double>(score.inlier_count);
  return score;
}

}  // namespace

CalibrationResult ransac_select_views(const PlanarTarget& target,
                                      std::span<const CalibrationObservation> views, int width,
                                      int height, const ViewSelectionConfig& cfg) {
  if (cfg.min_sample < 3) {
    throw Error(ErrorCategory::kConfig, "min_sample must be at least 3");
  }
  if (views.size() < cfg.min_sample) {
    throw Error(ErrorCategory::kInsufficientData, "fewer views than the RANSAC minimal sample",
                {{"views", std::to_string(views.size())}, {"min_sample", std::to_string(cfg.min_sample)}});
  }

  // The hypothesis schedule is fixed by the seed; workers only decide who
  // evaluates which index, so the outcome is independent of thread count.
  std::vector<HypothesisScore> scores(cfg.iterations);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(cfg.threads == 0 ? hw : cfg.threads, std::max<std::size_t>(1, cfg.iterations)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t h = next++; h < cfg.iterations; h = next++) {
      scores[h] = evaluate_hypothesis(target, views, width, height, cfg, h);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  const HypothesisScore* best = nullptr;
  for (const auto& s : scores) {
    if (!s.valid) continue;
    if (!best || s.inlier_count > best->inlier_count ||
        (s.inlier_count == best->inlier_count && s.mean_inlier_rpe < best->mean_inlier_rpe)) {
      best = &s;
    }
  }
  if (!best || best->inlier_count < cfg.min_sample) {
    throw Error(ErrorCategory::kNoConsensus, "no view-selection hypothesis reached min_sample inliers",
                {{"best_inliers", std::to_string(best ? best->inlier_count : 0)}});
  }

  std::vector<CalibrationObservation> inliers;
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (best->inliers[i]) inliers.push_back(views[i]);
  }
  return estimate_intrinsics(target, inliers, width, height, cfg.refinement);
}

}  // namespace arthro
