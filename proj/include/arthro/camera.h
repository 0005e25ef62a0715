#pragma once

#include <string>
#include <vector>

#include "arthro/geometry.h"

namespace arthro {

/// Pinhole camera with two-term radial distortion, zero skew.
struct PinholeCamera {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  int width = 0;
  int height = 0;

  /// Throws Error(kInput) if focal lengths are not positive or the principal
  /// point lies outside the image.
  void validate() const;
};

/// Applies radial distortion to normalized image coordinates.
Vec2 distort(const PinholeCamera& cam, const Vec2& normalized);

/// Inverts distort() by fixed-point iteration (at most 20 iterations,
/// stopping once the update falls below 1e-10).
Vec2 undistort_normalized(const PinholeCamera& cam, const Vec2& distorted);

/// Pixel -> undistorted normalized coordinates.
Vec2 undistort_pixel(const PinholeCamera& cam, const Vec2& pixel);

/// Projects a point in camera coordinates to pixels.
/// Throws Error(kBehindCamera) when p_cam.z() <= 0.
Vec2 project(const PinholeCamera& cam, const Vec3& p_cam);

/// Point cloud in millimetres.
struct PointCloud {
  std::vector<Vec3> points;
  std::string frame_id = "world";

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

}  // namespace arthro
