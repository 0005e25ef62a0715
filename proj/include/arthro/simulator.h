#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "arthro/calibration.h"
#include "arthro/camera.h"
#include "arthro/fusion.h"
#include "arthro/geometry.h"
#include "arthro/metrics.h"
#include "arthro/trajectory.h"

namespace arthro::sim {

/// Perturbation settings. Sigmas are RMS magnitudes of isotropic
/// perturbations: a 3-d position error with pos_sigma = 0.5 mm has RMS length
/// 0.5 mm; a 2-d pixel error with pixel_sigma = 0.5 px has RMS length 0.5 px.
struct NoiseModel {
  double pixel_sigma = 0.0;     // px
  double pos_sigma = 0.0;       // mm
  double rot_sigma = 0.0;       // deg
  double outlier_fraction = 0.0;
  double outlier_magnitude = 0.0;  // px or mm depending on the generator
  std::uint64_t seed = 0;

  void validate() const;
};

enum class TrajectoryKind { kScrew, kLissajous };

struct TrajectoryConfig {
  double duration_s = 20.0;
  double rate_hz = 30.0;
  TrajectoryKind kind = TrajectoryKind::kLissajous;
  double amplitude_mm = 20.0;
  double omega_rad_s = 2.0 * M_PI / 10.0;  // lissajous base angular frequency
  double wobble_rad = 0.35;                 // lissajous orientation amplitude
  Vec3 linear_velocity = Vec3::Zero();      // screw: body-frame mm/s
  Vec3 angular_velocity = Vec3::Zero();     // screw: body-frame rad/s
  RigidTransform origin;                    // pose at the motion's reference point
  std::uint64_t seed = 0;                   // lissajous orientation phases
};

/// C-infinity analytic motion sampled at rate_hz over [0, duration_s].
/// Lissajous: p(t) = (A sin wt, A sin 2wt, 0.3 A sin 3wt) with a slowly
/// varying orientation. Screw: constant body-frame twist.
Trajectory gen_trajectory(const TrajectoryConfig& cfg);

struct RigObservation {
  Trajectory external;
  Trajectory scope_measured;
};

/// External camera poses gt_scope * hand_eye^-1 and a metric arthroscope
/// track, both perturbed by pos_sigma / rot_sigma.
RigObservation simulate_rig(const Trajectory& gt_scope, const RigidTransform& hand_eye, const NoiseModel& noise);

struct WindowSpec {
  double t_start = 0.0;
  double t_end = 0.0;
};

struct LocalMapOptions {
  bool random_frame = true;
  std::size_t points_per_window = 300;
};

/// Scale-ambiguous local maps: every window's slice of gt_scope is moved to a
/// random local frame and multiplied by its scale (local = s * R * global + t),
/// with noise added in millimetres before scaling. Sparse points are the
/// `surface` points nearest the window's mean position, mapped the same way.
/// Throws Error(kRange) if a window leaves the trajectory span.
std::vector<LocalMap> simulate_local_maps(const Trajectory& gt_scope, std::span<const WindowSpec> windows,
                                          std::span<const double> scales, const NoiseModel& noise,
                                          const PointCloud& surface = {}, const LocalMapOptions& options = {});

/// Similarity mapping a simulated window's local frame back to the global frame.
std::vector<SimilarityTransform> local_map_truth(std::span<const WindowSpec> windows,
                                                 std::span<const double> scales, const NoiseModel& noise,
                                                 const LocalMapOptions& options = {});

struct ViewVolume {
  double depth_min_mm = 300.0;
  double depth_max_mm = 800.0;
  double max_tilt_deg = 45.0;
  double max_roll_deg = 30.0;
  double border_px = 20.0;
};

struct SimulatedView {
  CalibrationObservation observation;
  RigidTransform target_to_camera;
  bool outlier = false;
};

/// Random target poses inside the volume, corners projected through `cam`,
/// pixel noise added; round(outlier_fraction * n_views) views get every corner
/// displaced by outlier_magnitude px in a random direction.
std::vector<SimulatedView> simulate_calibration_views(const PinholeCamera& cam, const PlanarTarget& target,
                                                      std::size_t n_views, const NoiseModel& noise,
                                                      const ViewVolume& volume = {});

enum class SurfaceShape { kSpherePatch, kEllipsoidPatch };

struct SurfaceConfig {
  SurfaceShape shape = SurfaceShape::kSpherePatch;
  double radius_mm = 25.0;
  double extent_deg = 120.0;    // full opening angle of the cap around +z
  double density_per_mm2 = 1.0;
  std::uint64_t seed = 0;
  double noise_sigma_mm = 0.0;  // along the surface normal
  Vec3 center = Vec3::Zero();
};

/// Quasi-uniform (Fibonacci) samples on a spherical or ellipsoidal cap.
PointCloud sample_surface(const SurfaceConfig& cfg);

struct ScenarioConfig {
  TrajectoryConfig trajectory;
  RigidTransform hand_eye;
  std::vector<WindowSpec> windows;
  std::vector<double> window_scales;
  SurfaceConfig surface;
  NoiseModel noise;
  LocalMapOptions local_maps;

  PinholeCamera external_camera;
  PlanarTarget external_target{6, 9, 25.0};
  ViewVolume external_volume;
  std::size_t external_views = 20;

  PinholeCamera scope_camera;
  PlanarTarget scope_target{6, 9, 2.0};
  ViewVolume scope_volume;
  std::size_t scope_views = 20;

  Vec3 shaft_axis = Vec3::UnitZ();
  std::size_t shaft_validation_views = 8;

  /// Noiseless desk-scale rig; `noisy` switches on 0.5 px / 0.5 mm / 0.1 deg.
  static ScenarioConfig defaults(bool noisy = false);
};

struct SimScenario {
  ScenarioConfig config;
  Trajectory gt_scope;
  Trajectory gt_external;
  RigObservation measured;
  RigidTransform hand_eye;
  PointCloud surface;
  std::vector<LocalMap> local_windows;
  std::vector<double> true_window_scales;
  std::vector<SimulatedView> external_views;
  std::vector<SimulatedView> scope_views;
  std::vector<ShaftValidationView> shaft_validation;
  PinholeCamera camera_truth;  // arthroscope
  Image rendered;
  Image reference;

  /// Throws Error(kInput) unless gt_external * hand_eye reproduces gt_scope.
  void check_consistency(double tol = 1e-9) const;
};

SimScenario make_scenario(const ScenarioConfig& cfg);

}  // namespace arthro::sim
