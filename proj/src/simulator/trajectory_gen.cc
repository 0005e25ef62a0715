#include <cmath>

#include "arthro/error.h"
#include "internal.h"

namespace arthro::sim {
namespace {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

// Exponential of the body twist (rho, phi).
RigidTransform se3_exp(const Vec3& rho, const Vec3& phi) {
  const double theta = phi.norm();
  const Mat3 k = skew(phi);
  Mat3 v = Mat3::Identity();
  if (theta > 1e-9) {
    v += (1.0 - std::cos(theta)) / (theta * theta) * k +
         (theta - std::sin(theta)) / (theta * theta * theta) * k * k;
  } else {
    v += 0.5 * k + k * k / 6.0;
  }
  return {Rotation::from_rotation_vector(phi), v * rho};
}

}  // namespace

Trajectory gen_trajectory(const TrajectoryConfig& cfg) {
  if (!(cfg.duration_s > 0.0) || !(cfg.rate_hz > 0.0)) {
    throw Error(ErrorCategory::kConfig, "duration and rate must be positive");
  }
  const auto n = static_cast<std::size_t>(std::floor(cfg.duration_s * cfg.rate_hz + 1e-9)) + 1;
  Rng rng = Rng::derive(cfg.seed, 0);
  const double phase1 = rng.uniform(0.0, 2.0 * M_PI);
  const double phase2 = rng.uniform(0.0, 2.0 * M_PI);
  const double phase3 = rng.uniform(0.0, 2.0 * M_PI);

  std::vector<TimedPose> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / cfg.rate_hz;
    RigidTransform local;
    if (cfg.kind == TrajectoryKind::kLissajous) {
      const double a = cfg.amplitude_mm;
      const double w = cfg.omega_rad_s;
      local.translation = Vec3(a * std::sin(w * t), a * std::sin(2.0 * w * t), 0.3 * a * std::sin(3.0 * w * t));
      const Vec3 wobble(std::sin(0.7 * w * t + phase1), std::sin(1.1 * w * t + phase2),
                        0.8 * std::sin(0.5 * w * t + phase3));
      local.rotation = Rotation::from_rotation_vector(cfg.wobble_rad * wobble);
    } else {
      local = se3_exp(cfg.linear_velocity * t, cfg.angular_velocity * t);
    }
    samples.push_back({t, compose(cfg.origin, local)});
  }
  return Trajectory(std::move(samples), "world", LengthUnit::kMillimetre);
}

}  // namespace arthro::sim
