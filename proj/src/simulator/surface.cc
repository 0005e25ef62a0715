#include <algorithm>
#include <cmath>

#include "arthro/error.h"
#include "internal.h"

namespace arthro::sim {

PointCloud sample_surface(const SurfaceConfig& cfg) {
  if (!(cfg.radius_mm > 0.0) || !(cfg.density_per_mm2 > 0.0)) {
    throw Error(ErrorCategory::kConfig, "surface radius and density must be positive");
  }
  if (!(cfg.extent_deg > 0.0 && cfg.extent_deg <= 360.0)) {
    throw Error(ErrorCategory::kConfig, "surface extent must lie in (0, 360] degrees");
  }
  const double half = std::min(cfg.extent_deg, 360.0) * M_PI / 360.0;
  const double cap = 1.0 - std::cos(half);
  const double area = 2.0 * M_PI * cfg.radius_mm * cfg.radius_mm * cap;
  const auto n = static_cast<std::size_t>(std::max(1.0, std::round(cfg.density_per_mm2 * area)));

  Rng rng = Rng::derive(cfg.seed, detail::kSurface);
  Rng noise_rng = Rng::derive(cfg.seed, detail::kSurfaceNoise);
  const double phase = rng.uniform(0.0, 2.0 * M_PI);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));

  // Ellipsoid semi-axes relative to the radius.
  const Vec3 axes = cfg.shape == SurfaceShape::kSpherePatch ? Vec3(1.0, 1.0, 1.0) : Vec3(1.0, 0.8, 0.6);

  PointCloud cloud;
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - cap * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = phase + golden * static_cast<double>(i);
    const Vec3 unit(rho * std::cos(phi), rho * std::sin(phi), z);
    const Vec3 p = cfg.radius_mm * unit.cwiseProduct(axes);
    Vec3 normal = unit.cwiseQuotient(axes).normalized();
    Vec3 out = cfg.center + p;
    if (cfg.noise_sigma_mm > 0.0) out += noise_rng.normal() * cfg.noise_sigma_mm * normal;
    cloud.points.push_back(out);
  }
  return cloud;
}

}  // namespace arthro::sim
