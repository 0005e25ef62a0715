#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "arthro/report.h"
#include "arthro/simulator.h"

namespace arthro {

/// Workspace layout shared by every subcommand (paths relative to --out).
namespace layout {
inline constexpr const char* kScenario = "scenario.json";
inline constexpr const char* kGtScope = "tracks/gt_scope.tum";
inline constexpr const char* kGtExternal = "tracks/gt_external.tum";
inline constexpr const char* kExternal = "tracks/external.tum";
inline constexpr const char* kScopeMeasured = "tracks/scope_measured.tum";
inline constexpr const char* kWindows = "windows";
inline constexpr const char* kSurface = "surface.ply";
inline constexpr const char* kExternalViews = "calib/external_views.json";
inline constexpr const char* kScopeViews = "calib/scope_views.json";
inline constexpr const char* kShaftValidation = "calib/shaft_validation.json";
inline constexpr const char* kReferenceImage = "images/reference.pgm";
inline constexpr const char* kRenderedImage = "images/rendered.pgm";
inline constexpr const char* kExternalCamera = "calibration/external_camera.json";
inline constexpr const char* kScopeCamera = "calibration/scope_camera.json";
inline constexpr const char* kHandEye = "calibration/hand_eye.json";
inline constexpr const char* kFusedTrajectory = "fused/trajectory.tum";
inline constexpr const char* kFusedPoints = "fused/points.ply";
inline constexpr const char* kReports = "reports";
}  // namespace layout

/// Planar-target detections of one camera, as stored in a workspace.
struct ViewSet {
  PlanarTarget target{1, 1, 1.0};
  int width = 0;
  int height = 0;
  std::vector<CalibrationObservation> views;
};

Json view_set_to_json(const ViewSet& set);
ViewSet view_set_from_json(const Json& j);

Json shaft_validation_to_json(const PlanarTarget& target, const std::vector<ShaftValidationView>& views);
std::vector<ShaftValidationView> shaft_validation_from_json(const Json& j, PlanarTarget& target);

/// Writes every artifact of a simulated scenario into `dir`, lengths in `unit`.
void write_scenario(const sim::SimScenario& s, const std::string& dir, LengthUnit unit, const Json& config_echo);

/// Full default configuration; `preset` selects the simulate noise baseline.
Json default_config(const std::string& preset = "noiseless");

/// Overlays `user` on `defaults`. Throws Error(kConfig) for keys absent from
/// the defaults or values of the wrong JSON type.
Json merge_config(const Json& defaults, const Json& user, const std::string& path = "");

/// Runs one CLI invocation (arguments without the program name). Returns the
/// process exit status; machine-readable errors go to `err` as JSON.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace arthro
