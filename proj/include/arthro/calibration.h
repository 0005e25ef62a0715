#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "arthro/camera.h"
#include "arthro/geometry.h"
#include "arthro/trajectory.h"

namespace arthro {

/// Planar checkerboard: rows x cols inner corners on the z = 0 plane, spaced
/// `spacing_mm` apart, corner (r, c) at (c * spacing, r * spacing, 0).
class PlanarTarget {
 public:
  PlanarTarget(int rows, int cols, double spacing_mm);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double spacing_mm() const { return spacing_; }
  std::size_t corner_count() const { return corners_.size(); }
  std::span<const Vec3> corners() const { return corners_; }

 private:
  int rows_;
  int cols_;
  double spacing_;
  std::vector<Vec3> corners_;
};

struct CalibrationObservation {
  std::string view_id;
  std::vector<Vec2> image_points;  // one per target corner, same order
};

struct ViewPose {
  std::string view_id;
  RigidTransform target_to_camera;
};

struct CalibrationResult {
  PinholeCamera camera;
  std::vector<ViewPose> per_view_poses;
  double rpe_pixels = 0.0;
  std::vector<std::string> inlier_views;
};

/// Levenberg-Marquardt controls shared by every refinement in this module.
struct RefinementOptions {
  int max_iterations = 100;
  double relative_tolerance = 1e-10;
  double initial_damping = 1e-3;
  double damping_factor = 10.0;
};

/// Plane-to-image homography by normalized DLT. Throws
/// Error(kDegenerateView) when the correspondences are rank deficient.
Mat3 estimate_homography(std::span<const Vec2> plane, std::span<const Vec2> image,
                         const std::string& view_id = {});

/// RMS over corners of the pixel distance between projected and measured
/// corners. Throws Error(kBehindCamera) if any corner projects behind the camera.
double reprojection_error(const PinholeCamera& cam, const RigidTransform& target_to_camera,
                          const PlanarTarget& target, const CalibrationObservation& obs);

/// Target pose for known intrinsics: homography on undistorted points, then
/// pose-only refinement of the reprojection error.
RigidTransform estimate_view_pose(const PinholeCamera& cam, const PlanarTarget& target,
                                  const CalibrationObservation& obs,
                                  const RefinementOptions& options = {});

/// Closed-form initialization from per-view homographies followed by joint
/// refinement of fx, fy, cx, cy, k1, k2 and every view pose.
/// `width`/`height` are the image size recorded in the returned camera.
CalibrationResult estimate_intrinsics(const PlanarTarget& target,
                                      std::span<const CalibrationObservation> views, int width,
                                      int height, const RefinementOptions& options = {});

struct ViewSelectionConfig {
  std::size_t min_sample = 5;
  std::size_t iterations = 100;
  double inlier_rpe_threshold = 2.0;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
  RefinementOptions refinement;
};

/// RANSAC over views: calibrate on random min_sample subsets, count views
/// whose RPE under the hypothesis stays below threshold, refit on the best
/// consensus set. Results depend only on the seed, never on `threads`.
CalibrationResult ransac_select_views(const PlanarTarget& target,
                                      std::span<const CalibrationObservation> views, int width,
                                      int height, const ViewSelectionConfig& cfg = {});

/// Synchronous relative motions of two rigidly coupled frames: A X = X B.
struct HandEyeMotionPair {
  RigidTransform motion_a;
  RigidTransform motion_b;
};

struct HandEyeOptions {
  double similar_motion_tolerance_deg = 2.0;
  double min_axis_separation_deg = 5.0;
};

/// Least-squares X for A_i X = X B_i: rotation from the smallest singular
/// vector of the stacked quaternion constraints, translation by linear least
/// squares given that rotation.
RigidTransform solve_hand_eye(std::span<const HandEyeMotionPair> pairs, const HandEyeOptions& options = {});

/// Relative motions between samples i and i + stride of two time-associated
/// tracks (a: external camera, b: arthroscope).
std::vector<HandEyeMotionPair> motion_pairs_from_tracks(const Trajectory& a, const Trajectory& b,
                                                        std::size_t stride, double max_dt = 0.05,
                                                        double min_rotation_deg = 1.0);

/// Arthroscope view of the target taken while the external camera's pose in
/// the target frame was known.
struct ShaftValidationView {
  RigidTransform external_pose;  // external camera -> target frame
  CalibrationObservation observation;
};

/// RMS reprojection error of target corners predicted through the chain
/// external_pose * x for every validation view.
double chain_reprojection_error(const RigidTransform& x, const PinholeCamera& cam,
                                const PlanarTarget& target,
                                std::span<const ShaftValidationView> validation);

struct ShaftSearchOptions {
  double lower_mm = -50.0;
  double upper_mm = 50.0;
  double tolerance_mm = 1e-4;
};

struct ShaftCompensation {
  RigidTransform hand_eye;
  double offset_mm = 0.0;
  double rpe_before = 0.0;
  double rpe_after = 0.0;
};

/// Slides the hand-eye translation along the shaft axis (arthroscope frame)
/// to the offset minimizing the chained reprojection error; rotation is kept.
ShaftCompensation compensate_shaft_offset(const RigidTransform& x, const Vec3& shaft_axis,
                                          const PinholeCamera& cam, const PlanarTarget& target,
                                          std::span<const ShaftValidationView> validation,
                                          const ShaftSearchOptions& options = {});

/// Metric size of a pixel error at the working depth.
double rpe_pixels_to_mm(double rpe_pixels, double focal_pixels, double mean_depth_mm);

}  // namespace arthro
