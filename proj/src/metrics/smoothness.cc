#include <cmath>
#include <string>

#include "arthro/error.h"
#include "arthro/metrics.h"

namespace arthro {

SmoothnessStats smoothness(const Trajectory& traj, double resample_dt) {
  if (!(resample_dt > 0.0)) {
    throw Error(ErrorCategory::kConfig, "resample_dt must be positive");
  }
  if (traj.size() < 3 || traj.end_time() - traj.start_time() < 2.0 * resample_dt) {
    throw Error(ErrorCategory::kInsufficientData, "trajectory too short for smoothness",
                {{"samples", std::to_string(traj.size())}});
  }
  const double t0 = traj.start_time();
  const auto n = static_cast<std::size_t>(std::floor((traj.end_time() - t0) / resample_dt + 1e-9)) + 1;
  std::vector<RigidTransform> poses;
  poses.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::min(t0 + static_cast<double>(i) * resample_dt, traj.end_time());
    poses.push_back(interpolate_pose(traj, t));
  }

  const double dt2 = resample_dt * resample_dt;
  double lin = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec3 a = (poses[i + 1].translation - 2.0 * poses[i].translation + poses[i - 1].translation) / dt2;
    lin += a.squaredNorm();
  }

  // Body-frame angular velocity between consecutive samples.
  std::vector<Vec3> omega;
  omega.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Rotation rel = poses[i].rotation.inverse() * poses[i + 1].rotation;
    omega.push_back(rel.rotation_vector() / resample_dt);
  }
  double ang = 0.0;
  for (std::size_t i = 0; i + 1 < omega.size(); ++i) {
    ang += ((omega[i + 1] - omega[i]) / resample_dt).squaredNorm();
  }

  const double interior = static_cast<double>(n - 2);
  return {std::sqrt(lin / interior), std::sqrt(ang / interior)};
}

}  // namespace arthro
