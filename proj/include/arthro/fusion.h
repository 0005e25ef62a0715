#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arthro/camera.h"
#include "arthro/geometry.h"
#include "arthro/trajectory.h"

namespace arthro {

/// Scale-ambiguous monocular reconstruction from one arthroscope window. The
/// trajectory and the sparse points share one arbitrary-scale local frame.
struct LocalMap {
  Trajectory trajectory;
  PointCloud points;
  std::string window_id;
};

/// Metric external-camera track plus the hand-eye transform mapping arthroscope
/// coordinates into the external camera frame.
struct GlobalTrack {
  Trajectory trajectory;
  RigidTransform hand_eye;
};

struct AlignmentFailure {
  std::string category;
  std::string message;
};

struct AlignmentResult {
  SimilarityTransform transform;  // local -> global
  std::size_t inlier_count = 0;
  std::size_t pair_count = 0;
  double rms_residual = 0.0;  // mm, over inliers
  std::string window_id;
  std::optional<AlignmentFailure> failure;
  std::vector<bool> inlier_mask;  // per input pair; not serialized
};

struct GlobalModel {
  Trajectory fused_trajectory;
  PointCloud fused_points;
  std::vector<AlignmentResult> per_window;
};

struct PointPair {
  Vec3 src;
  Vec3 dst;
};

struct RobustAlignConfig {
  std::size_t iterations = 200;
  double inlier_threshold_mm = 3.0;
  std::uint64_t seed = 0;
};

struct AlignConfig {
  double max_dt = 0.05;
  RobustAlignConfig robust;
};

/// Arthroscope poses in the global frame: every external pose composed with
/// the hand-eye transform.
Trajectory predict_scope_track(const GlobalTrack& g);

/// Closed-form least-squares similarity minimizing sum |dst - (s R src + t)|^2.
/// Throws Error(kInput) on count mismatch or fewer than 3 pairs and
/// Error(kDegenerateGeometry) when src is collinear or coincident.
SimilarityTransform umeyama_sim3(std::span<const Vec3> src, std::span<const Vec3> dst);

/// Same estimator with the scale fixed to 1.
RigidTransform umeyama_rigid(std::span<const Vec3> src, std::span<const Vec3> dst);

/// RANSAC over 3-pair Umeyama hypotheses, then a refit on all inliers of the
/// best hypothesis. Throws Error(kNoConsensus) if no hypothesis gathers 3
/// inliers.
AlignmentResult robust_align(std::span<const PointPair> pairs, const RobustAlignConfig& cfg = {});

/// Registers one window into the global frame by aligning its trajectory
/// positions to the predicted arthroscope track.
AlignmentResult align_window(const LocalMap& local, const GlobalTrack& g, const AlignConfig& cfg = {});

/// Aligns every window, maps trajectories and points to the global frame and
/// merges them, blending poses where consecutive windows overlap in time.
/// Windows that fail alignment are recorded with a failure and skipped;
/// Error(kFusion) if none succeed.
GlobalModel fuse_local_maps(std::span<const LocalMap> windows, const GlobalTrack& g,
                            const AlignConfig& cfg = {});

/// The merge step of fuse_local_maps for alignments computed elsewhere: one
/// result per window, failed ones skipped.
GlobalModel assemble_global_model(std::span<const LocalMap> windows, std::vector<AlignmentResult> per_window,
                                  const std::string& frame_id = "world");

}  // namespace arthro
