#include <string>

#include "arthro/calibration.h"
#include "arthro/error.h"

namespace arthro {

PlanarTarget::PlanarTarget(int rows, int cols, double spacing_mm)
    : rows_(rows), cols_(cols), spacing_(spacing_mm) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorCategory::kInput, "target needs at least one row and column");
  }
  if (!(spacing_mm > 0.0)) {
    throw Error(ErrorCategory::kInput, "target spacing must be positive");
  }
  corners_.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) corners_.emplace_back(c * spacing_mm, r * spacing_mm, 0.0);
  }
}

double rpe_pixels_to_mm(double rpe_pixels, double focal_pixels, double mean_depth_mm) {
  if (!(focal_pixels > 0.0) || !(mean_depth_mm > 0.0)) {
    throw Error(ErrorCategory::kInput, "focal length and depth must be positive");
  }
  return rpe_pixels * mean_depth_mm / focal_pixels;
}

}  // namespace arthro
