#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "arthro/error.h"
#include "internal.h"

namespace arthro::sim {

void NoiseModel::validate() const {
  if (pixel_sigma < 0.0 || pos_sigma < 0.0 || rot_sigma < 0.0 || outlier_magnitude < 0.0) {
    throw Error(ErrorCategory::kConfig, "noise sigmas must be non-negative");
  }
  if (!(outlier_fraction >= 0.0 && outlier_fraction <= 1.0)) {
    throw Error(ErrorCategory::kConfig, "outlier_fraction must lie in [0, 1]");
  }
}

namespace detail {

Vec3 isotropic(double rms_length, Rng& rng) {
  return rng.normal3() * (rms_length / std::sqrt(3.0));
}

RigidTransform perturb(const RigidTransform& pose, double pos_sigma, double rot_sigma_deg, Rng& rng) {
  RigidTransform out = pose;
  if (rot_sigma_deg > 0.0) {
    out.rotation = pose.rotation * Rotation::from_rotation_vector(isotropic(rot_sigma_deg * M_PI / 180.0, rng));
  }
  if (pos_sigma > 0.0) out.translation += isotropic(pos_sigma, rng);
  return out;
}

}  // namespace detail

RigObservation simulate_rig(const Trajectory& gt_scope, const RigidTransform& hand_eye, const NoiseModel& noise) {
  noise.validate();
  Rng ext_rng = Rng::derive(noise.seed, detail::kExternalNoise);
  Rng scope_rng = Rng::derive(noise.seed, detail::kScopeNoise);
  const RigidTransform he_inv = invert(hand_eye);
  std::vector<TimedPose> external, scope;
  external.reserve(gt_scope.size());
  scope.reserve(gt_scope.size());
  for (const auto& s : gt_scope.samples()) {
    external.push_back({s.timestamp, detail::perturb(compose(s.pose, he_inv), noise.pos_sigma, noise.rot_sigma, ext_rng)});
    scope.push_back({s.timestamp, detail::perturb(s.pose, noise.pos_sigma, noise.rot_sigma, scope_rng)});
  }
  return {Trajectory(std::move(external), gt_scope.frame_id()), Trajectory(std::move(scope), gt_scope.frame_id())};
}

namespace {

void check_windows(std::span<const WindowSpec> windows, std::span<const double> scales) {
  if (windows.size() != scales.size()) {
    throw Error(ErrorCategory::kInput, "need exactly one scale per window");
  }
  for (const double s : scales) {
    if (!(s > 0.0)) throw Error(ErrorCategory::kInput, "window scales must be positive");
  }
}

SimilarityTransform global_to_local(std::uint64_t seed, std::size_t k, double scale, bool random_frame) {
  if (!random_frame) return {scale, Rotation(), Vec3::Zero()};
  Rng rng = Rng::derive(seed, detail::kWindowFrame + k);
  const Rotation r = rng.rotation();
  const Vec3 t = rng.normal3() * 50.0;
  return {scale, r, t};
}

}  // namespace

std::vector<SimilarityTransform> local_map_truth(std::span<const WindowSpec> windows,
                                                 std::span<const double> scales, const NoiseModel& noise,
                                                 const LocalMapOptions& options) {
  check_windows(windows, scales);
  std::vector<SimilarityTransform> out;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    out.push_back(invert(global_to_local(noise.seed, k, scales[k], options.random_frame)));
  }
  return out;
}

std::vector<LocalMap> simulate_local_maps(const Trajectory& gt_scope, std::span<const WindowSpec> windows,
                                          std::span<const double> scales, const NoiseModel& noise,
                                          const PointCloud& surface, const LocalMapOptions& options) {
  noise.validate();
  check_windows(windows, scales);
  if (gt_scope.empty()) throw Error(ErrorCategory::kInput, "ground-truth trajectory is empty");
  std::vector<LocalMap> maps;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const WindowSpec& w = windows[k];
    if (!(w.t_start < w.t_end) || w.t_start < gt_scope.start_time() || w.t_end > gt_scope.end_time()) {
      throw Error(ErrorCategory::kRange, "window outside trajectory span",
                  {{"window", std::to_string(k)}, {"t_start", std::to_string(w.t_start)},
                   {"t_end", std::to_string(w.t_end)}});
    }
    const SimilarityTransform to_local = global_to_local(noise.seed, k, scales[k], options.random_frame);
    Rng rng = Rng::derive(noise.seed, detail::kWindowNoise + k);

    LocalMap map;
    map.window_id = "w" + std::to_string(k);
    std::vector<TimedPose> samples;
    Vec3 mean = Vec3::Zero();
    for (const auto& s : gt_scope.samples()) {
      if (s.timestamp < w.t_start || s.timestamp > w.t_end) continue;
      mean += s.pose.translation;
      const RigidTransform noisy = detail::perturb(s.pose, noise.pos_sigma, noise.rot_sigma, rng);
      samples.push_back({s.timestamp, transform_pose(to_local, noisy)});
    }
    if (samples.size() < 3) {
      throw Error(ErrorCategory::kRange, "window covers fewer than 3 samples", {{"window", std::to_string(k)}});
    }
    mean /= static_cast<double>(samples.size());
    map.trajectory = Trajectory(std::move(samples), "local_" + map.window_id, LengthUnit::kMillimetre);

    if (!surface.empty()) {
      std::vector<std::size_t> order(surface.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      const std::size_t keep = std::min(options.points_per_window, surface.size());
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                        [&](std::size_t a, std::size_t b) {
                          const double da = (surface.points[a] - mean).squaredNorm();
                          const double db = (surface.points[b] - mean).squaredNorm();
                          return da < db || (da == db && a < b);
                        });
      std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
      for (std::size_t i = 0; i < keep; ++i) {
        Vec3 p = surface.points[order[i]];
        if (noise.pos_sigma > 0.0) p += detail::isotropic(noise.pos_sigma, rng);
        map.points.points.push_back(apply_sim3(to_local, p));
      }
    }
    map.points.frame_id = map.trajectory.frame_id();
    maps.push_back(std::move(map));
  }
  return maps;
}

}  // namespace arthro::sim
