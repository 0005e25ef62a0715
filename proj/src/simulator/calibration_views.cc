#include <algorithm>
#include <cmath>
#include <string>

#include "arthro/error.h"
#include "internal.h"

namespace arthro::sim {
namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr int kMaxAttempts = 10000;

bool inside(const PinholeCamera& cam, const Vec2& px, double border) {
  return px.x() >= border && px.x() <= cam.width - 1 - border && px.y() >= border &&
         px.y() <= cam.height - 1 - border;
}

}  // namespace

std::vector<SimulatedView> simulate_calibration_views(const PinholeCamera& cam, const PlanarTarget& target,
                                                      std::size_t n_views, const NoiseModel& noise,
                                                      const ViewVolume& volume) {
  cam.validate();
  noise.validate();
  if (n_views == 0) throw Error(ErrorCategory::kInput, "n_views must be at least 1");
  if (!(volume.depth_min_mm > 0.0) || volume.depth_max_mm < volume.depth_min_mm) {
    throw Error(ErrorCategory::kConfig, "invalid view depth range");
  }

  Rng pose_rng = Rng::derive(noise.seed, detail::kViewPoses);
  Rng noise_rng = Rng::derive(noise.seed, detail::kViewNoise);
  Rng outlier_rng = Rng::derive(noise.seed, detail::kViewOutliers);

  const Vec3 center((target.cols() - 1) * target.spacing_mm() / 2.0,
                    (target.rows() - 1) * target.spacing_mm() / 2.0, 0.0);
  std::vector<SimulatedView> views;
  views.reserve(n_views);
  for (std::size_t v = 0; v < n_views; ++v) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      const double depth = pose_rng.uniform(volume.depth_min_mm, volume.depth_max_mm);
      const double tilt_dir = pose_rng.uniform(0.0, 2.0 * M_PI);
      const double tilt = pose_rng.uniform(0.0, volume.max_tilt_deg) * kDegToRad;
      const double roll = pose_rng.uniform(-volume.max_roll_deg, volume.max_roll_deg) * kDegToRad;
      const double u = pose_rng.uniform(0.4, 0.6) * cam.width;
      const double w = pose_rng.uniform(0.4, 0.6) * cam.height;
      const Rotation r = Rotation::from_axis_angle(Vec3(std::cos(tilt_dir), std::sin(tilt_dir), 0.0), tilt) *
                         Rotation::from_axis_angle(Vec3::UnitZ(), roll);
      const Vec3 centre_cam = depth * Vec3((u - cam.cx) / cam.fx, (w - cam.cy) / cam.fy, 1.0);
      const RigidTransform pose{r, centre_cam - r * center};

      SimulatedView view;
      view.target_to_camera = pose;
      view.observation.view_id = "v" + std::string(v < 10 ? "0" : "") + std::to_string(v);
      placed = true;
      for (const Vec3& c : target.corners()) {
        const Vec3 pc = pose * c;
        if (!(pc.z() > 0.0)) {
          placed = false;
          break;
        }
        const Vec2 px = project(cam, pc);
        if (!inside(cam, px, volume.border_px)) {
          placed = false;
          break;
        }
        view.observation.image_points.push_back(px);
      }
      if (placed) views.push_back(std::move(view));
    }
    if (!placed) {
      throw Error(ErrorCategory::kConfig, "could not place a calibration view inside the image",
                  {{"view", std::to_string(v)}});
    }
  }

  const double per_axis = noise.pixel_sigma / std::sqrt(2.0);
  for (auto& view : views) {
    for (Vec2& px : view.observation.image_points) {
      if (per_axis > 0.0) px += Vec2(noise_rng.normal(), noise_rng.normal()) * per_axis;
    }
  }
  const auto n_outliers = static_cast<std::size_t>(std::llround(noise.outlier_fraction * static_cast<double>(n_views)));
  for (const std::size_t v : outlier_rng.sample(n_views, n_outliers)) {
    views[v].outlier = true;
    for (Vec2& px : views[v].observation.image_points) {
      const double angle = outlier_rng.uniform(0.0, 2.0 * M_PI);
      px += noise.outlier_magnitude * Vec2(std::cos(angle), std::sin(angle));
    }
  }
  for (auto& view : views) {
    for (Vec2& px : view.observation.image_points) {
      px.x() = std::clamp(px.x(), 0.0, static_cast<double>(cam.width - 1));
      px.y() = std::clamp(px.y(), 0.0, static_cast<double>(cam.height - 1));
    }
  }
  return views;
}

}  // namespace arthro::sim
