#include "arthro/camera.h"

#include <cmath>
#include <string>

#include "arthro/error.h"

namespace arthro {

void PinholeCamera::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCategory::kInput, "focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCategory::kInput, "image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw Error(ErrorCategory::kInput, "principal point outside image");
  }
}

Vec2 distort(const PinholeCamera& cam, const Vec2& normalized) {
  const double r2 = normalized.squaredNorm();
  return normalized * (1.0 + cam.k1 * r2 + cam.k2 * r2 * r2);
}

Vec2 undistort_normalized(const PinholeCamera& cam, const Vec2& distorted) {
  constexpr int kMaxIterations = 20;
  constexpr double kTolerance = 1e-10;
  Vec2 x = distorted;
  for (int i = 0; i < kMaxIterations; ++i) {
    const double r2 = x.squaredNorm();
    const Vec2 next = distorted / (1.0 + cam.k1 * r2 + cam.k2 * r2 * r2);
    const double step = (next - x).norm();
    x = next;
    if (step < kTolerance) break;
  }
  return x;
}

Vec2 undistort_pixel(const PinholeCamera& cam, const Vec2& pixel) {
  return undistort_normalized(cam, Vec2((pixel.x() - cam.cx) / cam.fx, (pixel.y() - cam.cy) / cam.fy));
}

Vec2 project(const PinholeCamera& cam, const Vec3& p_cam) {
  if (!(p_cam.z() > 0.0)) {
    throw Error(ErrorCategory::kBehindCamera, "point is behind the camera",
                {{"z", std::to_string(p_cam.z())}});
  }
  const Vec2 d = distort(cam, Vec2(p_cam.x() / p_cam.z(), p_cam.y() / p_cam.z()));
  return {cam.fx * d.x() + cam.cx, cam.fy * d.y() + cam.cy};
}

}  // namespace arthro
