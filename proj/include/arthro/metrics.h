#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "arthro/camera.h"
#include "arthro/geometry.h"
#include "arthro/trajectory.h"

namespace arthro {

struct TrajErrorSample {
  double timestamp = 0.0;
  double trans_err_mm = 0.0;
  double rot_err_deg = 0.0;
};

struct TrajError {
  double trans_rmse = 0.0;  // mm
  double rot_rmse = 0.0;    // deg
  std::vector<TrajErrorSample> per_sample;
};

enum class AteAlignment { kNone, kRigid, kSimilarity };

/// Absolute trajectory error of `est` against `gt` after optional alignment
/// of est positions onto gt. Samples are associated by time (max_dt).
/// Throws Error(kNoOverlap) with fewer than 2 associated samples.
TrajError ate(const Trajectory& est, const Trajectory& gt, AteAlignment mode = AteAlignment::kRigid,
              double max_dt = 0.05);

/// Relative trajectory error over `delta` associated samples:
/// E_i = (gt_i^-1 gt_{i+d})^-1 (est_i^-1 est_{i+d}).
TrajError rte(const Trajectory& est, const Trajectory& gt, std::size_t delta = 1, double max_dt = 0.05);

struct SmoothnessStats {
  double rms_linear_accel = 0.0;   // mm/s^2
  double rms_angular_accel = 0.0;  // rad/s^2
};

/// RMS linear and angular acceleration after uniform resampling at resample_dt.
SmoothnessStats smoothness(const Trajectory& traj, double resample_dt = 1.0 / 30.0);

struct IcpConfig {
  int max_iterations = 50;
  double tolerance_mm = 1e-4;
  RigidTransform init;
};

struct IcpResult {
  RigidTransform transform;  // src -> dst
  double rms_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Point-to-point ICP; stops when the RMS nearest-neighbour distance changes by
/// less than tolerance_mm. Converges to a local optimum and never throws on a
/// poor fit; inspect rms_residual.
IcpResult icp_rigid(const PointCloud& src, const PointCloud& dst, const IcpConfig& cfg = {});

/// RMS over src of the distance to the nearest ref point (asymmetric).
double nn_rmse(const PointCloud& src, const PointCloud& ref);

/// Symmetric Hausdorff distance.
double hausdorff(const PointCloud& a, const PointCloud& b);

/// 8-bit image, row-major, interleaved channels.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;

  std::uint8_t at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

/// Luminance plane (0.299 R + 0.587 G + 0.114 B for 3-channel images).
std::vector<double> luminance(const Image& img);

/// Peak signal-to-noise ratio in dB; +infinity for identical images.
double psnr(const Image& a, const Image& b);

/// Mean SSIM over valid 11x11 Gaussian windows (sigma 1.5) of the luminance.
double ssim(const Image& a, const Image& b);

struct MetricReport {
  std::optional<TrajError> ate;
  std::optional<TrajError> rte;
  std::optional<SmoothnessStats> smoothness_gt;
  std::optional<SmoothnessStats> smoothness_pred;
  std::optional<double> rmse_mm;
  std::optional<double> hausdorff_mm;
  std::optional<double> psnr_db;
  std::optional<double> ssim;
};

}  // namespace arthro
