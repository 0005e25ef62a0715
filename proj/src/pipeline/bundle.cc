#include <filesystem>
#include <string>

#include "arthro/error.h"
#include "arthro/io.h"
#include "arthro/pipeline.h"

namespace arthro {
namespace {

namespace fs = std::filesystem;

Json points_to_json(const std::vector<Vec2>& pts) {
  Json arr = Json::array();
  for (const auto& p : pts) arr.push_back(Json::array({p.x(), p.y()}));
  return arr;
}

std::vector<Vec2> points_from_json(const Json& j) {
  std::vector<Vec2> pts;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw Error(ErrorCategory::kFormat, "image points must be [u, v] pairs");
    pts.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return pts;
}

Json target_to_json(const PlanarTarget& t) {
  return Json{{"rows", t.rows()}, {"cols", t.cols()}, {"spacing_mm", t.spacing_mm()}};
}

PlanarTarget target_from_json(const Json& j) {
  return PlanarTarget(j.at("rows").get<int>(), j.at("cols").get<int>(), j.at("spacing_mm").get<double>());
}

void put(const fs::path& path, std::string_view contents) {
  fs::create_directories(path.parent_path());
  write_file(path.string(), contents);
}

const char* type_name(const Json& j) {
  if (j.is_boolean()) return "boolean";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  if (j.is_object()) return "object";
  return "null";
}

}  // namespace

Json view_set_to_json(const ViewSet& set) {
  Json views = Json::array();
  for (const auto& v : set.views) {
    views.push_back(Json{{"view_id", v.view_id}, {"image_points", points_to_json(v.image_points)}});
  }
  return Json{{"target", target_to_json(set.target)},
              {"image_size", {{"width", set.width}, {"height", set.height}}},
              {"views", std::move(views)}};
}

ViewSet view_set_from_json(const Json& j) {
  ViewSet set;
  set.target = target_from_json(j.at("target"));
  set.width = j.at("image_size").at("width").get<int>();
  set.height = j.at("image_size").at("height").get<int>();
  for (const auto& v : j.at("views")) {
    set.views.push_back({v.at("view_id").get<std::string>(), points_from_json(v.at("image_points"))});
  }
  return set;
}

Json shaft_validation_to_json(const PlanarTarget& target, const std::vector<ShaftValidationView>& views) {
  Json arr = Json::array();
  for (const auto& v : views) {
    arr.push_back(Json{{"view_id", v.observation.view_id},
                       {"external_pose", v.external_pose},
                       {"image_points", points_to_json(v.observation.image_points)}});
  }
  return Json{{"target", target_to_json(target)}, {"views", std::move(arr)}};
}

std::vector<ShaftValidationView> shaft_validation_from_json(const Json& j, PlanarTarget& target) {
  target = target_from_json(j.at("target"));
  std::vector<ShaftValidationView> views;
  for (const auto& v : j.at("views")) {
    views.push_back({v.at("external_pose").get<RigidTransform>(),
                     {v.at("view_id").get<std::string>(), points_from_json(v.at("image_points"))}});
  }
  return views;
}

void write_scenario(const sim::SimScenario& s, const std::string& dir, LengthUnit unit, const Json& config_echo) {
  const fs::path root(dir);
  const auto& cfg = s.config;

  Json truth = Json::object();
  truth["hand_eye"] = s.hand_eye;
  truth["external_camera"] = cfg.external_camera;
  truth["scope_camera"] = s.camera_truth;
  truth["external_target"] = target_to_json(cfg.external_target);
  truth["scope_target"] = target_to_json(cfg.scope_target);
  truth["shaft_axis"] = Json::array({cfg.shaft_axis.x(), cfg.shaft_axis.y(), cfg.shaft_axis.z()});
  truth["trajectory_origin"] = cfg.trajectory.origin;
  truth["window_scales"] = s.true_window_scales;
  truth["window_transforms"] = sim::local_map_truth(cfg.windows, cfg.window_scales, cfg.noise, cfg.local_maps);
  Json outliers = Json::array();
  for (const auto* views : {&s.external_views, &s.scope_views}) {
    for (const auto& v : *views) {
      if (v.outlier) outliers.push_back(v.observation.view_id);
    }
  }
  truth["outlier_views"] = std::move(outliers);
  put(root / layout::kScenario,
      dump_json(Json{{"schema_version", 1}, {"config", config_echo}, {"truth", std::move(truth)}}));

  put(root / layout::kGtScope, write_tum(s.gt_scope.converted_to(unit)));
  put(root / layout::kGtExternal, write_tum(s.gt_external.converted_to(unit)));
  put(root / layout::kExternal, write_tum(s.measured.external.converted_to(unit)));
  put(root / layout::kScopeMeasured, write_tum(s.measured.scope_measured.converted_to(unit)));
  for (const auto& w : s.local_windows) {
    put(root / layout::kWindows / (w.window_id + ".tum"), write_tum(w.trajectory.converted_to(unit)));
    put(root / layout::kWindows / (w.window_id + ".ply"), write_ply(w.points, unit));
  }
  put(root / layout::kSurface, write_ply(s.surface, unit));

  ViewSet ext{cfg.external_target, cfg.external_camera.width, cfg.external_camera.height, {}};
  for (const auto& v : s.external_views) ext.views.push_back(v.observation);
  put(root / layout::kExternalViews, dump_json(view_set_to_json(ext)));
  ViewSet scope{cfg.scope_target, cfg.scope_camera.width, cfg.scope_camera.height, {}};
  for (const auto& v : s.scope_views) scope.views.push_back(v.observation);
  put(root / layout::kScopeViews, dump_json(view_set_to_json(scope)));
  put(root / layout::kShaftValidation, dump_json(shaft_validation_to_json(cfg.scope_target, s.shaft_validation)));

  put(root / layout::kReferenceImage, write_image(s.reference));
  put(root / layout::kRenderedImage, write_image(s.rendered));
}

Json default_config(const std::string& preset) {
  const auto sc = sim::ScenarioConfig::defaults(preset == "noisy");
  Json windows = Json::array();
  for (const auto& w : sc.windows) windows.push_back(Json::array({w.t_start, w.t_end}));

  Json simulate = Json::object();
  simulate["preset"] = preset;
  simulate["noise"] = Json{{"pixel_sigma", sc.noise.pixel_sigma},
                           {"pos_sigma", sc.noise.pos_sigma},
                           {"rot_sigma", sc.noise.rot_sigma},
                           {"outlier_fraction", sc.noise.outlier_fraction},
                           {"outlier_magnitude", sc.noise.outlier_magnitude}};
  simulate["trajectory"] = Json{{"kind", "lissajous"},
                                {"duration_s", sc.trajectory.duration_s},
                                {"rate_hz", sc.trajectory.rate_hz},
                                {"amplitude_mm", sc.trajectory.amplitude_mm},
                                {"omega_rad_s", sc.trajectory.omega_rad_s},
                                {"wobble_rad", sc.trajectory.wobble_rad}};
  simulate["windows"] = std::move(windows);
  simulate["window_scales"] = sc.window_scales;
  simulate["points_per_window"] = sc.local_maps.points_per_window;
  simulate["surface"] = Json{{"shape", "sphere_patch"},
                             {"radius_mm", sc.surface.radius_mm},
                             {"extent_deg", sc.surface.extent_deg},
                             {"density_per_mm2", sc.surface.density_per_mm2},
                             {"noise_sigma_mm", sc.surface.noise_sigma_mm}};
  simulate["external_views"] = sc.external_views;
  simulate["scope_views"] = sc.scope_views;
  simulate["shaft_validation_views"] = sc.shaft_validation_views;

  const ViewSelectionConfig vs;
  const HandEyeOptions he;
  const ShaftSearchOptions shaft;
  const AlignConfig align;
  const IcpConfig icp;

  Json cfg = Json::object();
  cfg["seed"] = 7;
  cfg["unit"] = "mm";
  cfg["simulate"] = std::move(simulate);
  cfg["calibrate"] = Json{{"min_sample", vs.min_sample},
                          {"iterations", vs.iterations},
                          {"inlier_rpe_threshold_px", vs.inlier_rpe_threshold},
                          {"threads", vs.threads},
                          {"lm_max_iterations", vs.refinement.max_iterations},
                          {"lm_relative_tolerance", vs.refinement.relative_tolerance}};
  cfg["handeye"] = Json{{"stride", 15},
                        {"max_dt_s", 0.05},
                        {"min_rotation_deg", 1.0},
                        {"similar_motion_tolerance_deg", he.similar_motion_tolerance_deg},
                        {"min_axis_separation_deg", he.min_axis_separation_deg},
                        {"shaft_compensation", true},
                        {"shaft_axis", Json::array({0.0, 0.0, 1.0})},
                        {"search_lower_mm", shaft.lower_mm},
                        {"search_upper_mm", shaft.upper_mm},
                        {"search_tolerance_mm", shaft.tolerance_mm}};
  cfg["align"] = Json{{"max_dt_s", align.max_dt},
                      {"ransac_iterations", align.robust.iterations},
                      {"inlier_threshold_mm", align.robust.inlier_threshold_mm}};
  cfg["eval_traj"] = Json{{"ate_mode", "rigid"}, {"rte_delta", 1}, {"max_dt_s", 0.05}, {"resample_dt_s", 1.0 / 30.0}};
  cfg["eval_recon"] = Json{{"skip_icp", false},
                           {"icp_max_iterations", icp.max_iterations},
                           {"icp_tolerance_mm", icp.tolerance_mm}};
  return cfg;
}

Json merge_config(const Json& defaults, const Json& user, const std::string& path) {
  if (!user.is_object()) {
    throw Error(ErrorCategory::kConfig, "configuration must be a JSON object", {{"key", path.empty() ? "/" : path}});
  }
  Json merged = defaults;
  for (const auto& [key, value] : user.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!defaults.contains(key)) throw Error(ErrorCategory::kConfig, "unknown configuration key", {{"key", where}});
    const Json& def = defaults.at(key);
    if (def.is_object()) {
      merged[key] = merge_config(def, value, where);
      continue;
    }
    const bool same_kind = (def.is_number() && value.is_number()) || (def.is_boolean() && value.is_boolean()) ||
                           (def.is_string() && value.is_string()) || (def.is_array() && value.is_array());
    if (!same_kind) {
      throw Error(ErrorCategory::kConfig, "configuration value has the wrong type",
                  {{"key", where}, {"expected", type_name(def)}, {"found", type_name(value)}});
    }
    if (def.is_number_integer() && !value.is_number_unsigned()) {
      throw Error(ErrorCategory::kConfig, "configuration value must be a non-negative integer", {{"key", where}});
    }
    merged[key] = value;
  }
  return merged;
}

}  // namespace arthro
