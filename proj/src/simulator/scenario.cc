#include <algorithm>
#include <cmath>
#include <string>

#include "arthro/error.h"
#include "internal.h"

namespace arthro::sim {
namespace {

constexpr double kDegToRad = M_PI / 180.0;

Image make_reference_image(int width, int height) {
  Image img{width, height, 1, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height)};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double shade = 120.0 + 55.0 * std::sin(x / 7.0) * std::cos(y / 9.0) +
                           35.0 * std::exp(-((x - 40.0) * (x - 40.0) + (y - 52.0) * (y - 52.0)) / 300.0);
      const double stripe = ((x / 12 + y / 16) % 2 == 0) ? 18.0 : -18.0;
      img.data[static_cast<std::size_t>(y) * width + x] =
          static_cast<std::uint8_t>(std::clamp(std::round(shade + stripe), 0.0, 255.0));
    }
  }
  return img;
}

Image add_pixel_noise(const Image& src, double sigma, Rng& rng) {
  Image out = src;
  if (sigma <= 0.0) return out;
  for (auto& v : out.data) {
    v = static_cast<std::uint8_t>(std::clamp(std::round(v + sigma * rng.normal()), 0.0, 255.0));
  }
  return out;
}

}  // namespace

ScenarioConfig ScenarioConfig::defaults(bool noisy) {
  ScenarioConfig cfg;
  cfg.trajectory.duration_s = 20.0;
  cfg.trajectory.rate_hz = 30.0;
  cfg.trajectory.kind = TrajectoryKind::kLissajous;
  cfg.trajectory.amplitude_mm = 20.0;
  cfg.trajectory.omega_rad_s = 2.0 * M_PI / 10.0;
  cfg.trajectory.wobble_rad = 0.35;
  cfg.trajectory.seed = 7;
  // Arthroscope hovering over the joint surface, looking down -z.
  cfg.trajectory.origin = {Rotation::from_axis_angle(Vec3::UnitX(), M_PI), Vec3(0.0, 0.0, 45.0)};

  // Arthroscope -> external camera: the external camera rides on the handle,
  // behind and beside the shaft, tilted towards the working field.
  cfg.hand_eye = {Rotation::from_axis_angle(Vec3(1.0, 0.3, 0.0), 18.0 * kDegToRad), Vec3(35.0, -42.0, 160.0)};

  cfg.windows = {{0.0, 7.5}, {6.5, 14.0}, {13.0, 20.0}};
  cfg.window_scales = {0.1, 0.5, 2.0};

  cfg.surface.shape = SurfaceShape::kSpherePatch;
  cfg.surface.radius_mm = 25.0;
  cfg.surface.extent_deg = 120.0;
  cfg.surface.density_per_mm2 = 1.0;
  cfg.surface.seed = 7;

  cfg.noise.seed = 7;
  if (noisy) {
    cfg.noise.pixel_sigma = 0.5;
    cfg.noise.pos_sigma = 0.5;
    cfg.noise.rot_sigma = 0.1;
  }

  cfg.external_camera = {900.0, 900.0, 640.0, 360.0, -0.05, 0.01, 1280, 720};
  cfg.external_volume = {300.0, 800.0, 45.0, 30.0, 20.0};
  cfg.scope_camera = {400.0, 400.0, 320.0, 240.0, -0.12, 0.02, 640, 480};
  cfg.scope_target = PlanarTarget(6, 9, 1.5);
  cfg.scope_volume = {15.0, 60.0, 45.0, 30.0, 20.0};
  return cfg;
}

void SimScenario::check_consistency(double tol) const {
  if (gt_scope.size() != gt_external.size()) {
    throw Error(ErrorCategory::kInput, "scenario trajectories differ in length");
  }
  for (std::size_t i = 0; i < gt_scope.size(); ++i) {
    const RigidTransform predicted = compose(gt_external[i].pose, hand_eye);
    if (gt_external[i].timestamp != gt_scope[i].timestamp ||
        translation_distance(predicted, gt_scope[i].pose) > tol ||
        geodesic_angle(predicted.rotation, gt_scope[i].pose.rotation) > tol) {
      throw Error(ErrorCategory::kInput, "external track composed with hand-eye does not reproduce the scope track",
                  {{"sample", std::to_string(i)}});
    }
  }
}

SimScenario make_scenario(const ScenarioConfig& cfg) {
  cfg.noise.validate();
  SimScenario s;
  s.config = cfg;
  s.hand_eye = cfg.hand_eye;
  s.gt_scope = gen_trajectory(cfg.trajectory);
  {
    NoiseModel clean;
    s.gt_external = simulate_rig(s.gt_scope, cfg.hand_eye, clean).external;
  }
  s.measured = simulate_rig(s.gt_scope, cfg.hand_eye, cfg.noise);
  s.surface = sample_surface(cfg.surface);
  s.local_windows = simulate_local_maps(s.gt_scope, cfg.windows, cfg.window_scales, cfg.noise, s.surface, cfg.local_maps);
  s.true_window_scales.reserve(cfg.window_scales.size());
  for (const double k : cfg.window_scales) s.true_window_scales.push_back(1.0 / k);

  NoiseModel ext_noise = cfg.noise;
  ext_noise.seed = cfg.noise.seed * 31 + 1;
  s.external_views = simulate_calibration_views(cfg.external_camera, cfg.external_target, cfg.external_views,
                                                ext_noise, cfg.external_volume);
  NoiseModel scope_noise = cfg.noise;
  scope_noise.seed = cfg.noise.seed * 31 + 2;
  s.scope_views = simulate_calibration_views(cfg.scope_camera, cfg.scope_target, cfg.scope_views, scope_noise,
                                             cfg.scope_volume);
  s.camera_truth = cfg.scope_camera;

  // Validation views for the shaft correction: arthroscope views of its target
  // with the external camera's pose in the target frame recorded alongside.
  NoiseModel validation_noise = cfg.noise;
  validation_noise.seed = cfg.noise.seed * 31 + 3;
  validation_noise.outlier_fraction = 0.0;
  Rng pose_rng = Rng::derive(validation_noise.seed, detail::kExternalNoise);
  const auto validation = simulate_calibration_views(cfg.scope_camera, cfg.scope_target, cfg.shaft_validation_views,
                                                     validation_noise, cfg.scope_volume);
  const RigidTransform he_inv = invert(cfg.hand_eye);
  for (const auto& v : validation) {
    const RigidTransform external_pose = compose(invert(v.target_to_camera), he_inv);
    s.shaft_validation.push_back(
        {detail::perturb(external_pose, cfg.noise.pos_sigma, cfg.noise.rot_sigma, pose_rng), v.observation});
  }

  s.reference = make_reference_image(96, 96);
  Rng image_rng = Rng::derive(cfg.noise.seed, detail::kImages);
  s.rendered = add_pixel_noise(s.reference, cfg.noise.pixel_sigma > 0.0 ? 4.0 : 0.0, image_rng);

  s.check_consistency();
  return s;
}

}  // namespace arthro::sim
