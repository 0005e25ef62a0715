#pragma once

#include "arthro/random.h"
#include "arthro/simulator.h"

namespace arthro::sim::detail {

// Rng sub-streams; one per generator so that enabling one noise source never
// shifts the draws of another.
enum Stream : std::uint64_t {
  kExternalNoise = 1,
  kScopeNoise = 2,
  kViewPoses = 10,
  kViewNoise = 11,
  kViewOutliers = 12,
  kSurface = 20,
  kSurfaceNoise = 21,
  kImages = 30,
  kWindowFrame = 1000,
  kWindowNoise = 2000,
};

/// Pose perturbed by an isotropic position error with RMS length pos_sigma and
/// a rotation error with RMS angle rot_sigma_deg (applied in the body frame).
RigidTransform perturb(const RigidTransform& pose, double pos_sigma, double rot_sigma_deg, Rng& rng);

Vec3 isotropic(double rms_length, Rng& rng);

}  // namespace arthro::sim::detail
