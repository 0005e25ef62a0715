#include <cmath>
#include <limits>
#include <string>

#include "arthro/error.h"
#include "internal.h"

namespace arthro {

double chain_reprojection_error(const RigidTransform& x, const PinholeCamera& cam,
                                const PlanarTarget& target,
                                std::span<const ShaftValidationView> validation) {
  if (validation.empty()) {
    throw Error(ErrorCategory::kInsufficientData, "no validation views");
  }
  double sum_sq = 0.0;
  for (const auto& v : validation) {
    const RigidTransform target_to_camera = invert(compose(v.external_pose, x));
    const double rpe = reprojection_error(cam, target_to_camera, target, v.observation);
    sum_sq += rpe * rpe;
  }
  return std::sqrt(sum_sq / static_cast<double>(validation.size()));
}

ShaftCompensation compensate_shaft_offset(const RigidTransform& x, const Vec3& shaft_axis,
                                          const PinholeCamera& cam, const PlanarTarget& target,
                                          std::span<const ShaftValidationView> validation,
                                          const ShaftSearchOptions& options) {
  if (validation.empty()) {
    throw Error(ErrorCategory::kInsufficientData, "shaft offset compensation needs validation views");
  }
  if (std::abs(shaft_axis.norm() - 1.0) > 1e-6) {
    throw Error(ErrorCategory::kInput, "shaft axis must be a unit vector");
  }
  if (!(options.upper_mm > options.lower_mm) || !(options.tolerance_mm > 0.0)) {
    throw Error(ErrorCategory::kConfig, "invalid shaft search interval");
  }

  // The axis lives in the arthroscope frame; moving the arthroscope origin
  // along it shifts the hand-eye translation by R * axis.
  const Vec3 direction = x.rotation * shaft_axis;
  auto shifted = [&](double offset) { return RigidTransform{x.rotation, x.translation + offset * direction}; };
  auto cost = [&](double offset) {
    try {
      return chain_reprojection_error(shifted(offset), cam, target, validation);
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::kBehindCamera) return std::numeric_limits<double>::infinity();
      throw;
    }
  };

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = options.lower_mm;
  double hi = options.upper_mm;
  double c = hi - invphi * (hi - lo);
  double d = lo + invphi * (hi - lo);
  double fc = cost(c);
  double fd = cost(d);
  while (hi - lo > options.tolerance_mm) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - invphi * (hi - lo);
      fc = cost(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + invphi * (hi - lo);
      fd = cost(d);
    }
  }

  ShaftCompensation out;
  out.rpe_before = chain_reprojection_error(x, cam, target, validation);
  const double best = 0.5 * (lo + hi);
  const double best_cost = cost(best);
  if (best_cost <= out.rpe_before) {
    out.offset_mm = best;
    out.rpe_after = best_cost;
  } else {
    out.offset_mm = 0.0;
    out.rpe_after = out.rpe_before;
  }
  out.hand_eye = shifted(out.offset_mm);
  return out;
}

}  // namespace arthro
