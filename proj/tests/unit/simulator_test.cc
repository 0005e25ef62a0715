#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "arthro/calibration.h"
#include "arthro/error.h"
#include "arthro/fusion.h"
#include "arthro/metrics.h"
#include "arthro/simulator.h"
#include "oracles.h"

namespace arthro::sim {
namespace {

ErrorCategory category_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.category();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCategory::kInput;
}

bool identical(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].timestamp != b[i].timestamp || a[i].pose.translation != b[i].pose.translation ||
        a[i].pose.rotation.quaternion().coeffs() != b[i].pose.rotation.quaternion().coeffs()) {
      return false;
    }
  }
  return true;
}

TEST(GenTrajectory, ZeroTwistScrewIsConstant) {
  TrajectoryConfig tc;
  tc.kind = TrajectoryKind::kScrew;
  tc.origin = {Rotation::from_axis_angle(Vec3::UnitY(), 0.3), Vec3(1, 2, 3)};
  const Trajectory t = gen_trajectory(tc);
  EXPECT_EQ(t.size(), 601u);
  for (const auto& s : t.samples()) {
    EXPECT_EQ(s.pose.translation, tc.origin.translation);
    EXPECT_LT(geodesic_angle(s.pose.rotation, tc.origin.rotation), 1e-12);
  }
}

TEST(GenTrajectory, PureTranslationScrewHasNoAcceleration) {
  TrajectoryConfig tc;
  tc.kind = TrajectoryKind::kScrew;
  tc.linear_velocity = Vec3(2, -1, 0.5);
  EXPECT_LT(smoothness(gen_trajectory(tc)).rms_linear_accel, 1e-9);
}

TEST(GenTrajectory, LissajousUnitOmegaSmoothness) {
  TrajectoryConfig tc;
  tc.amplitude_mm = 20.0;
  tc.omega_rad_s = 1.0;
  tc.duration_s = 4.0 * M_PI;
  const double expected = 20.0 * std::sqrt((1.0 + 16.0 + 0.09 * 81.0) / 2.0);
  EXPECT_NEAR(smoothness(gen_trajectory(tc)).rms_linear_accel, expected, 0.01 * expected);
}

TEST(GenTrajectory, Errors) {
  TrajectoryConfig tc;
  tc.rate_hz = 0.0;
  EXPECT_EQ(category_of([&] { gen_trajectory(tc); }), ErrorCategory::kConfig);
}

TEST(SimulateRig, NoiselessIdentityHandEye) {
  const Trajectory gt = gen_trajectory({});
  const RigObservation obs = simulate_rig(gt, RigidTransform::identity(), {});
  for (std::size_t i = 0; i < gt.size(); ++i) {
    EXPECT_LT(translation_distance(obs.external[i].pose, gt[i].pose), 1e-12);
    EXPECT_LT(translation_distance(obs.scope_measured[i].pose, gt[i].pose), 1e-12);
  }
}

TEST(SimulateRig, HandEyeRecoveredFromNoiselessTracks) {
  TrajectoryConfig tc;
  tc.seed = 11;
  const Trajectory gt = gen_trajectory(tc);
  const RigidTransform x = ScenarioConfig::defaults().hand_eye;
  const RigObservation obs = simulate_rig(gt, x, {});
  const RigidTransform solved = solve_hand_eye(motion_pairs_from_tracks(obs.external, obs.scope_measured, 15));
  EXPECT_LT(geodesic_angle(solved.rotation, x.rotation), 1e-8);
  EXPECT_LT(translation_distance(solved, x), 1e-8);
}

TEST(SimulateRig, SeedDeterministicAndNoiseSized) {
  const Trajectory gt = gen_trajectory({});
  NoiseModel noise;
  noise.seed = 3;
  noise.pos_sigma = 0.5;
  noise.rot_sigma = 0.1;
  const RigObservation a = simulate_rig(gt, {}, noise);
  const RigObservation b = simulate_rig(gt, {}, noise);
  EXPECT_TRUE(identical(a.external, b.external));
  EXPECT_TRUE(identical(a.scope_measured, b.scope_measured));
  double sum = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) sum += std::pow(translation_distance(a.scope_measured[i].pose, gt[i].pose), 2);
  EXPECT_NEAR(std::sqrt(sum / static_cast<double>(gt.size())), 0.5, 0.05);
  noise.pos_sigma = -1.0;
  EXPECT_EQ(category_of([&] { simulate_rig(gt, {}, noise); }), ErrorCategory::kConfig);
}

TEST(SimulateLocalMaps, UnitScaleIdentityFrameIsGroundTruthSlice) {
  const Trajectory gt = gen_trajectory({});
  const std::vector<WindowSpec> spec{{2.0, 5.0}};
  const std::vector<double> scales{1.0};
  LocalMapOptions opts;
  opts.random_frame = false;
  const auto maps = simulate_local_maps(gt, spec, scales, {}, {}, opts);
  ASSERT_EQ(maps.size(), 1u);
  const Trajectory& local = maps[0].trajectory;
  EXPECT_EQ(local.size(), 91u);
  for (const auto& s : local.samples()) {
    EXPECT_LT(translation_distance(s.pose, interpolate_pose(gt, s.timestamp)), 1e-12);
  }
}

TEST(SimulateLocalMaps, QuarterScaleRecoveredByAlignment) {
  const auto cfg = ScenarioConfig::defaults();
  const Trajectory gt = gen_trajectory(cfg.trajectory);
  const GlobalTrack track{simulate_rig(gt, cfg.hand_eye, {}).external, cfg.hand_eye};
  const std::vector<WindowSpec> spec{{3.0, 9.0}};
  const std::vector<double> scales{0.25};
  const auto maps = simulate_local_maps(gt, spec, scales, {});
  EXPECT_NEAR(align_window(maps[0], track).transform.scale, 4.0, 4e-6);
}

TEST(SimulateLocalMaps, NoisyResidualNearSigma) {
  const auto cfg = ScenarioConfig::defaults();
  const Trajectory gt = gen_trajectory(cfg.trajectory);
  const GlobalTrack track{simulate_rig(gt, cfg.hand_eye, {}).external, cfg.hand_eye};
  const std::vector<WindowSpec> spec{{0.0, 10.0}};
  const std::vector<double> scales{0.5};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    NoiseModel noise;
    noise.seed = seed;
    noise.pos_sigma = 0.5;
    const auto maps = simulate_local_maps(gt, spec, scales, noise);
    const double residual = align_window(maps[0], track).rms_residual;
    EXPECT_GT(residual, 0.25);
    EXPECT_LT(residual, 0.75);
  }
}

TEST(SimulateLocalMaps, WindowOutsideSpan) {
  const Trajectory gt = gen_trajectory({});
  const std::vector<WindowSpec> spec{{15.0, 25.0}};
  const std::vector<double> scales{1.0};
  EXPECT_EQ(category_of([&] { simulate_local_maps(gt, spec, scales, {}); }), ErrorCategory::kRange);
}

TEST(SimulateCalibrationViews, NoiselessViewsReprojectExactly) {
  const auto cfg = ScenarioConfig::defaults();
  const auto views = simulate_calibration_views(cfg.scope_camera, cfg.scope_target, 10, {}, cfg.scope_volume);
  for (const auto& v : views) {
    EXPECT_LT(reprojection_error(cfg.scope_camera, v.target_to_camera, cfg.scope_target, v.observation), 1e-9);
    EXPECT_LT(geodesic_angle(v.target_to_camera.rotation, Rotation()), 60.0);
  }
}

TEST(SimulateCalibrationViews, NoisyViewsCalibrate) {
  const auto cfg = ScenarioConfig::defaults();
  NoiseModel noise;
  noise.seed = 9;
  noise.pixel_sigma = 0.5;
  std::vector<CalibrationObservation> obs;
  for (const auto& v : simulate_calibration_views(cfg.external_camera, cfg.external_target, 20, noise)) {
    obs.push_back(v.observation);
  }
  const auto result = estimate_intrinsics(cfg.external_target, obs, cfg.external_camera.width, cfg.external_camera.height);
  EXPECT_LT(std::abs(result.camera.fx / cfg.external_camera.fx - 1.0), 5e-3);
}

TEST(SimulateCalibrationViews, PlantedOutliersFlagged) {
  const auto cfg = ScenarioConfig::defaults();
  NoiseModel noise;
  noise.seed = 10;
  noise.pixel_sigma = 0.5;
  noise.outlier_fraction = 0.2;
  noise.outlier_magnitude = 10.0;
  const auto views = simulate_calibration_views(cfg.external_camera, cfg.external_target, 25, noise);
  std::size_t planted = 0;
  std::vector<CalibrationObservation> obs;
  for (const auto& v : views) {
    planted += v.outlier ? 1 : 0;
    obs.push_back(v.observation);
  }
  EXPECT_EQ(planted, 5u);
  ViewSelectionConfig sel;
  sel.seed = 1;
  const auto result = ransac_select_views(cfg.external_target, obs, cfg.external_camera.width,
                                          cfg.external_camera.height, sel);
  std::size_t excluded = 0;
  for (const auto& v : views) {
    if (v.outlier && std::find(result.inlier_views.begin(), result.inlier_views.end(), v.observation.view_id) ==
                         result.inlier_views.end()) {
      ++excluded;
    }
  }
  EXPECT_GE(excluded, 4u);
}

TEST(SampleSurface, NoiselessPointsOnSphere) {
  SurfaceConfig sc;
  sc.center = Vec3(1, 2, 3);
  const PointCloud c = sample_surface(sc);
  ASSERT_GT(c.size(), 100u);
  for (const Vec3& p : c.points) EXPECT_NEAR((p - sc.center).norm(), sc.radius_mm, 1e-12);
}

TEST(SampleSurface, IndependentSamplingsWithinSamplingGap) {
  SurfaceConfig a;
  a.seed = 1;
  SurfaceConfig b = a;
  b.seed = 2;
  b.density_per_mm2 = 1.3;
  EXPECT_LT(hausdorff(sample_surface(a), sample_surface(b)), 1.0 / std::sqrt(a.density_per_mm2));
}

TEST(SampleSurface, NormalNoiseShowsInRmse) {
  // Same samples, displaced along the normal; spacing is well above the noise.
  SurfaceConfig clean;
  SurfaceConfig noisy = clean;
  noisy.noise_sigma_mm = 0.2;
  EXPECT_NEAR(nn_rmse(sample_surface(noisy), sample_surface(clean)), 0.2, 0.04);
}

TEST(SampleSurface, Errors) {
  SurfaceConfig sc;
  sc.radius_mm = 0.0;
  EXPECT_EQ(category_of([&] { sample_surface(sc); }), ErrorCategory::kConfig);
}

TEST(MakeScenario, ConsistentAndDeterministic) {
  const SimScenario a = make_scenario(ScenarioConfig::defaults(true));
  const SimScenario b = make_scenario(ScenarioConfig::defaults(true));
  EXPECT_NO_THROW(a.check_consistency());
  EXPECT_TRUE(identical(a.measured.external, b.measured.external));
  EXPECT_TRUE(identical(a.local_windows[1].trajectory, b.local_windows[1].trajectory));
  EXPECT_EQ(a.surface.points, b.surface.points);
  EXPECT_EQ(a.rendered.data, b.rendered.data);
  ASSERT_EQ(a.true_window_scales.size(), 3u);
  for (double s : a.true_window_scales) EXPECT_GT(s, 0.0);

  SimScenario broken = a;
  broken.hand_eye.translation.x() += 1.0;
  EXPECT_EQ(category_of([&] { broken.check_consistency(); }), ErrorCategory::kInput);
}

TEST(MakeScenario, NoiselessSolversCloseTheLoop) {
  const SimScenario s = make_scenario(ScenarioConfig::defaults());
  const GlobalTrack track{s.measured.external, s.hand_eye};
  const GlobalModel m = fuse_local_maps(s.local_windows, track);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(m.per_window[i].transform.scale, s.true_window_scales[i], 1e-6 * s.true_window_scales[i]);
  }
  EXPECT_LT(ate(m.fused_trajectory, s.gt_scope).trans_rmse, 1e-6);
}

}  // namespace
}  // namespace arthro::sim
