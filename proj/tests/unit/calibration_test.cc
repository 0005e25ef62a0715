#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "arthro/calibration.h"
#include "arthro/error.h"
#include "arthro/simulator.h"
#include "oracles.h"

namespace arthro {
namespace {

constexpr double kDeg = M_PI / 180.0;

const PinholeCamera kCam{900.0, 905.0, 640.0, 360.0, -0.05, 0.01, 1280, 720};
const PlanarTarget kTarget(6, 9, 25.0);

std::vector<sim::SimulatedView> views(std::uint64_t seed, std::size_t n, double pixel_sigma = 0.0,
                                      double outlier_fraction = 0.0) {
  sim::NoiseModel noise;
  noise.seed = seed;
  noise.pixel_sigma = pixel_sigma;
  noise.outlier_fraction = outlier_fraction;
  noise.outlier_magnitude = 10.0;
  return sim::simulate_calibration_views(kCam, kTarget, n, noise);
}

std::vector<CalibrationObservation> observations(const std::vector<sim::SimulatedView>& v) {
  std::vector<CalibrationObservation> out;
  for (const auto& s : v) out.push_back(s.observation);
  return out;
}

ErrorCategory category_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.category();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCategory::kInput;
}

TEST(PlanarTarget, CornersOnPlane) {
  EXPECT_EQ(kTarget.corner_count(), 54u);
  for (const Vec3& c : kTarget.corners()) EXPECT_EQ(c.z(), 0.0);
  EXPECT_EQ(kTarget.corners()[10], Vec3(25.0, 25.0, 0.0));
  EXPECT_THROW(PlanarTarget(6, 9, 0.0), Error);
}

TEST(ReprojectionError, ExactObservationsGiveZero) {
  const auto v = views(1, 1);
  EXPECT_LT(reprojection_error(kCam, v[0].target_to_camera, kTarget, v[0].observation), 1e-9);
}

TEST(ReprojectionError, ConstantOffsetGivesItsLength) {
  auto v = views(2, 1);
  for (Vec2& p : v[0].observation.image_points) p += Vec2(3, 4);
  EXPECT_NEAR(reprojection_error(kCam, v[0].target_to_camera, kTarget, v[0].observation), 5.0, 1e-9);
}

TEST(ReprojectionError, MatchesPerCornerLoop) {
  const auto v = views(3, 1, 1.0);
  const auto& obs = v[0].observation;
  double sum = 0.0;
  for (std::size_t i = 0; i < kTarget.corner_count(); ++i) {
    const Vec3 pc = v[0].target_to_camera.rotation.matrix() * kTarget.corners()[i] + v[0].target_to_camera.translation;
    const double x = pc.x() / pc.z(), y = pc.y() / pc.z();
    const double r2 = x * x + y * y;
    const double f = 1.0 + kCam.k1 * r2 + kCam.k2 * r2 * r2;
    const double u = kCam.fx * f * x + kCam.cx, w = kCam.fy * f * y + kCam.cy;
    sum += (u - obs.image_points[i].x()) * (u - obs.image_points[i].x()) +
           (w - obs.image_points[i].y()) * (w - obs.image_points[i].y());
  }
  EXPECT_NEAR(reprojection_error(kCam, v[0].target_to_camera, kTarget, obs), std::sqrt(sum / 54.0), 1e-9);
}

TEST(ReprojectionError, BehindCamera) {
  const auto v = views(4, 1);
  const RigidTransform flipped{Rotation(), Vec3(0, 0, -100)};
  EXPECT_EQ(category_of([&] { reprojection_error(kCam, flipped, kTarget, v[0].observation); }),
            ErrorCategory::kBehindCamera);
}

TEST(Homography, CollinearCornersAreDegenerateView) {
  std::vector<Vec2> plane, image;
  for (int i = 0; i < 6; ++i) {
    plane.emplace_back(i, 0);
    image.emplace_back(10 * i, 5);
  }
  try {
    estimate_homography(plane, image, "bad");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kDegenerateView);
    EXPECT_NE(std::string(e.what()).find("bad"), std::string::npos);
  }
}

TEST(EstimateIntrinsics, NoiselessRecoversCameraAndPoses) {
  const auto v = views(5, 20);
  const auto result = estimate_intrinsics(kTarget, observations(v), kCam.width, kCam.height);
  EXPECT_LT(std::abs(result.camera.fx / kCam.fx - 1.0), 1e-3);
  EXPECT_LT(std::abs(result.camera.fy / kCam.fy - 1.0), 1e-3);
  EXPECT_LT(std::abs(result.camera.cx / kCam.cx - 1.0), 1e-3);
  EXPECT_LT(std::abs(result.camera.cy / kCam.cy - 1.0), 1e-3);
  EXPECT_NEAR(result.camera.k1, kCam.k1, 1e-3 * std::abs(kCam.k1));
  EXPECT_NEAR(result.camera.k2, kCam.k2, 1e-3 * std::abs(kCam.k2));
  EXPECT_LT(result.rpe_pixels, 1e-6);
  ASSERT_EQ(result.per_view_poses.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_LT(geodesic_angle(result.per_view_poses[i].target_to_camera.rotation, v[i].target_to_camera.rotation), 0.01);
    EXPECT_LT(translation_distance(result.per_view_poses[i].target_to_camera, v[i].target_to_camera), 0.01);
  }
}

TEST(EstimateIntrinsics, HalfPixelNoise) {
  for (std::uint64_t seed = 10; seed < 13; ++seed) {
    const auto result = estimate_intrinsics(kTarget, observations(views(seed, 20, 0.5)), kCam.width, kCam.height);
    EXPECT_GE(result.rpe_pixels, 0.3);
    EXPECT_LE(result.rpe_pixels, 0.7);
    EXPECT_LT(std::abs(result.camera.fx / kCam.fx - 1.0), 5e-3);
  }
}

TEST(EstimateIntrinsics, Errors) {
  const auto obs = observations(views(6, 2));
  EXPECT_EQ(category_of([&] { estimate_intrinsics(kTarget, obs, kCam.width, kCam.height); }),
            ErrorCategory::kInsufficientData);
}

TEST(RansacSelectViews, CleanViewsAllInliers) {
  const auto obs = observations(views(20, 20));
  ViewSelectionConfig cfg;
  cfg.iterations = 20;
  cfg.seed = 3;
  const auto ransac = ransac_select_views(kTarget, obs, kCam.width, kCam.height, cfg);
  EXPECT_EQ(ransac.inlier_views.size(), 20u);
  const auto direct = estimate_intrinsics(kTarget, obs, kCam.width, kCam.height);
  EXPECT_NEAR(ransac.camera.fx, direct.camera.fx, 1e-6);
  EXPECT_NEAR(ransac.camera.cy, direct.camera.cy, 1e-6);
}

TEST(RansacSelectViews, ExcludesPlantedOutliers) {
  const auto v = views(21, 25, 0.5, 0.2);
  const auto obs = observations(v);
  ViewSelectionConfig cfg;
  cfg.seed = 4;
  cfg.iterations = 50;
  const auto ransac = ransac_select_views(kTarget, obs, kCam.width, kCam.height, cfg);
  std::size_t excluded = 0;
  for (const auto& s : v) {
    if (!s.outlier) continue;
    if (std::find(ransac.inlier_views.begin(), ransac.inlier_views.end(), s.observation.view_id) ==
        ransac.inlier_views.end()) {
      ++excluded;
    }
  }
  EXPECT_GE(excluded, 4u);
  const auto all = estimate_intrinsics(kTarget, obs, kCam.width, kCam.height);
  EXPECT_LT(ransac.rpe_pixels, all.rpe_pixels);

  // The result is the refit on its own inlier set.
  std::vector<CalibrationObservation> inliers;
  for (const auto& o : obs) {
    if (std::find(ransac.inlier_views.begin(), ransac.inlier_views.end(), o.view_id) != ransac.inlier_views.end()) {
      inliers.push_back(o);
    }
  }
  const auto refit = estimate_intrinsics(kTarget, inliers, kCam.width, kCam.height);
  EXPECT_LE(ransac.rpe_pixels, refit.rpe_pixels + 1e-12);
}

TEST(RansacSelectViews, DeterministicAcrossThreadCounts) {
  const auto obs = observations(views(22, 25, 0.5, 0.2));
  ViewSelectionConfig cfg;
  cfg.seed = 99;
  cfg.iterations = 30;
  cfg.threads = 1;
  const auto one = ransac_select_views(kTarget, obs, kCam.width, kCam.height, cfg);
  cfg.threads = 4;
  const auto four = ransac_select_views(kTarget, obs, kCam.width, kCam.height, cfg);
  const auto again = ransac_select_views(kTarget, obs, kCam.width, kCam.height, cfg);
  EXPECT_EQ(one.inlier_views, four.inlier_views);
  EXPECT_EQ(one.camera.fx, four.camera.fx);
  EXPECT_EQ(one.rpe_pixels, four.rpe_pixels);
  EXPECT_EQ(four.rpe_pixels, again.rpe_pixels);
}

TEST(RansacSelectViews, TooFewViews) {
  const auto obs = observations(views(23, 4));
  EXPECT_EQ(category_of([&] { ransac_select_views(kTarget, obs, kCam.width, kCam.height); }),
            ErrorCategory::kInsufficientData);
}

std::vector<HandEyeMotionPair> synthesize_pairs(Rng& rng, const RigidTransform& x, std::size_t n) {
  std::vector<HandEyeMotionPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    const RigidTransform b{Rotation::from_axis_angle(rng.unit_vector(), rng.uniform(10.0, 60.0) * kDeg),
                           20.0 * rng.normal3()};
    pairs.push_back({compose(compose(x, b), invert(x)), b});
  }
  return pairs;
}

TEST(SolveHandEye, EqualMotionsGiveIdentity) {
  Rng rng(30);
  auto pairs = synthesize_pairs(rng, RigidTransform::identity(), 6);
  for (auto& p : pairs) p.motion_a = p.motion_b;
  const RigidTransform x = solve_hand_eye(pairs);
  EXPECT_LT(geodesic_angle(x.rotation, Rotation()), 1e-9);
  EXPECT_LT(x.translation.norm(), 1e-9);
}

TEST(SolveHandEye, RecoversPlantedTransform) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const RigidTransform truth = oracle::random_rigid(rng);
    const RigidTransform x = solve_hand_eye(synthesize_pairs(rng, truth, 10));
    EXPECT_LT(geodesic_angle(x.rotation, truth.rotation), 1e-8);
    EXPECT_LT(translation_distance(x, truth), 1e-8);
  }
}

TEST(SolveHandEye, Equivariance) {
  Rng rng(32);
  const RigidTransform truth = oracle::random_rigid(rng);
  const RigidTransform g = oracle::random_rigid(rng, 30.0);
  auto pairs = synthesize_pairs(rng, truth, 10);
  const RigidTransform x = solve_hand_eye(pairs);
  for (auto& p : pairs) p.motion_b = compose(compose(g, p.motion_b), invert(g));
  const RigidTransform xg = solve_hand_eye(pairs);
  const RigidTransform expected = compose(x, invert(g));
  EXPECT_LT(geodesic_angle(xg.rotation, expected.rotation), 1e-8);
  EXPECT_LT(translation_distance(xg, expected), 1e-8);
}

TEST(SolveHandEye, NoisyMotions) {
  Rng rng(33);
  int ok = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const RigidTransform truth = oracle::random_rigid(rng);
    auto pairs = synthesize_pairs(rng, truth, 10);
    for (auto& p : pairs) {
      p.motion_a = compose(p.motion_a, RigidTransform{Rotation::from_axis_angle(rng.unit_vector(), 0.1 * kDeg),
                                                      0.1 * rng.unit_vector()});
    }
    const RigidTransform x = solve_hand_eye(pairs);
    if (geodesic_angle(x.rotation, truth.rotation) < 0.5 && translation_distance(x, truth) < 1.0) ++ok;
  }
  EXPECT_GE(ok, 19);
}

TEST(SolveHandEye, Errors) {
  Rng rng(34);
  const auto pairs = synthesize_pairs(rng, oracle::random_rigid(rng), 3);
  EXPECT_EQ(category_of([&] { solve_hand_eye(std::span(pairs).first(1)); }), ErrorCategory::kInsufficientData);

  std::vector<HandEyeMotionPair> parallel;
  for (int i = 1; i <= 4; ++i) {
    const RigidTransform b{Rotation::from_axis_angle(Vec3::UnitZ(), 10.0 * i * kDeg), Vec3(i, 0, 0)};
    parallel.push_back({b, b});
  }
  EXPECT_EQ(category_of([&] { solve_hand_eye(parallel); }), ErrorCategory::kDegenerateMotion);
}

TEST(MotionPairsFromTracks, PairsSatisfyHandEyeRelation) {
  sim::TrajectoryConfig tc;
  tc.duration_s = 4.0;
  tc.seed = 2;
  const Trajectory scope = sim::gen_trajectory(tc);
  Rng rng(35);
  const RigidTransform x = oracle::random_rigid(rng, 50.0);
  std::vector<TimedPose> ext;
  for (const auto& s : scope.samples()) ext.push_back({s.timestamp, compose(s.pose, invert(x))});
  const auto pairs = motion_pairs_from_tracks(Trajectory(ext), scope, 10);
  ASSERT_GE(pairs.size(), 3u);
  for (const auto& p : pairs) {
    const RigidTransform lhs = compose(p.motion_a, x);
    const RigidTransform rhs = compose(x, p.motion_b);
    EXPECT_LT(geodesic_angle(lhs.rotation, rhs.rotation), 1e-9);
    EXPECT_LT(translation_distance(lhs, rhs), 1e-9);
  }
}

struct ShaftCase {
  PinholeCamera cam;
  PlanarTarget target{6, 9, 1.5};
  RigidTransform x;
  Vec3 axis = Vec3::UnitZ();
  std::vector<ShaftValidationView> validation;
};

ShaftCase shaft_case(std::uint64_t seed, double pixel_sigma) {
  const auto defaults = sim::ScenarioConfig::defaults();
  ShaftCase c;
  c.cam = defaults.scope_camera;
  c.x = defaults.hand_eye;
  sim::NoiseModel noise;
  noise.seed = seed;
  noise.pixel_sigma = pixel_sigma;
  for (const auto& v : sim::simulate_calibration_views(c.cam, c.target, 8, noise, defaults.scope_volume)) {
    c.validation.push_back({compose(invert(v.target_to_camera), invert(c.x)), v.observation});
  }
  return c;
}

TEST(CompensateShaftOffset, TrueTransformNeedsNoOffset) {
  const ShaftCase c = shaft_case(40, 0.0);
  const auto out = compensate_shaft_offset(c.x, c.axis, c.cam, c.target, c.validation);
  EXPECT_NEAR(out.offset_mm, 0.0, 1e-3);
  EXPECT_LE(out.rpe_after, out.rpe_before);
}

TEST(CompensateShaftOffset, RecoversPlantedOffset) {
  for (double sigma : {0.0, 0.5}) {
    const ShaftCase c = shaft_case(41, sigma);
    const RigidTransform shifted{c.x.rotation, c.x.translation + 5.0 * (c.x.rotation * c.axis)};
    const auto out = compensate_shaft_offset(shifted, c.axis, c.cam, c.target, c.validation);
    EXPECT_NEAR(out.offset_mm, -5.0, 0.01) << "sigma " << sigma;
    EXPECT_LE(out.rpe_after, out.rpe_before);
    EXPECT_EQ(out.hand_eye.rotation.quaternion().coeffs(), shifted.rotation.quaternion().coeffs());
    const double truth_rpe = chain_reprojection_error(c.x, c.cam, c.target, c.validation);
    EXPECT_LT(out.rpe_after, truth_rpe + 0.05);
  }
}

TEST(CompensateShaftOffset, NeverIncreasesRpe) {
  Rng rng(42);
  for (int i = 0; i < 10; ++i) {
    const ShaftCase c = shaft_case(50 + i, 0.5);
    const RigidTransform perturbed{
        compose(c.x, RigidTransform{Rotation::from_axis_angle(rng.unit_vector(), 0.5 * kDeg), Vec3::Zero()}).rotation,
        c.x.translation + rng.uniform(-3.0, 3.0) * rng.unit_vector()};
    const auto out = compensate_shaft_offset(perturbed, c.axis, c.cam, c.target, c.validation);
    EXPECT_LE(out.rpe_after, out.rpe_before);
  }
}

TEST(CompensateShaftOffset, EmptyValidation) {
  const ShaftCase c = shaft_case(43, 0.0);
  EXPECT_EQ(category_of([&] { compensate_shaft_offset(c.x, c.axis, c.cam, c.target, {}); }),
            ErrorCategory::kInsufficientData);
}

TEST(RpePixelsToMm, Examples) {
  EXPECT_EQ(rpe_pixels_to_mm(0.0, 800.0, 20.0), 0.0);
  EXPECT_NEAR(rpe_pixels_to_mm(16.0, 800.0, 20.0), 0.40, 1e-12);
  EXPECT_THROW(rpe_pixels_to_mm(1.0, 0.0, 20.0), Error);
}

}  // namespace
}  // namespace arthro
