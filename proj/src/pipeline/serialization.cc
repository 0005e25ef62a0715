#include <cmath>
#include <limits>
#include <string>

#include "arthro/error.h"
#include "arthro/report.h"
#include "text.h"

namespace arthro {
namespace {

Json vec(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 to_vec3(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCategory::kFormat, "expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// JSON has no infinity; PSNR of identical images is written as "inf".
Json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double from_number_or_inf(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorCategory::kFormat, "expected a number or \"inf\"");
  }
  return j.get<double>();
}

template <typename T>
void put_optional(Json& j, const char* key, const std::optional<T>& v) {
  if (v) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

template <typename T>
void get_optional(const Json& j, const char* key, std::optional<T>& v) {
  if (!j.contains(key) || j.at(key).is_null()) {
    v.reset();
  } else {
    v = j.at(key).get<T>();
  }
}

std::string csv_number(const std::optional<double>& v) {
  if (!v) return "";
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  return detail::format_double(*v);
}

}  // namespace

void to_json(Json& j, const Rotation& r) {
  const auto& q = r.quaternion();
  j = Json::array({q.w(), q.x(), q.y(), q.z()});
}

void from_json(const Json& j, Rotation& r) {
  if (!j.is_array() || j.size() != 4) throw Error(ErrorCategory::kFormat, "rotation must be [w, x, y, z]");
  r = Rotation::from_wxyz(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
}

void to_json(Json& j, const RigidTransform& t) {
  j = Json::object();
  j["rotation_wxyz"] = t.rotation;
  j["translation_mm"] = vec(t.translation);
}

void from_json(const Json& j, RigidTransform& t) {
  t.rotation = j.at("rotation_wxyz").get<Rotation>();
  t.translation = to_vec3(j.at("translation_mm"));
}

void to_json(Json& j, const SimilarityTransform& s) {
  j = Json::object();
  j["scale"] = s.scale;
  j["rotation_wxyz"] = s.rotation;
  j["translation_mm"] = vec(s.translation);
}

void from_json(const Json& j, SimilarityTransform& s) {
  s.scale = j.at("scale").get<double>();
  s.rotation = j.at("rotation_wxyz").get<Rotation>();
  s.translation = to_vec3(j.at("translation_mm"));
}

void to_json(Json& j, const PinholeCamera& c) {
  j = Json{{"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx}, {"cy", c.cy}, {"k1", c.k1},
           {"k2", c.k2}, {"width", c.width}, {"height", c.height}};
}

void from_json(const Json& j, PinholeCamera& c) {
  c.fx = j.at("fx").get<double>();
  c.fy = j.at("fy").get<double>();
  c.cx = j.at("cx").get<double>();
  c.cy = j.at("cy").get<double>();
  c.k1 = j.at("k1").get<double>();
  c.k2 = j.at("k2").get<double>();
  c.width = j.at("width").get<int>();
  c.height = j.at("height").get<int>();
}

void to_json(Json& j, const CalibrationResult& r) {
  j = Json::object();
  j["camera"] = r.camera;
  j["rpe_pixels"] = r.rpe_pixels;
  j["inlier_views"] = r.inlier_views;
  Json poses = Json::array();
  for (const auto& p : r.per_view_poses) {
    poses.push_back(Json{{"view_id", p.view_id}, {"target_to_camera", p.target_to_camera}});
  }
  j["per_view_poses"] = std::move(poses);
}

void from_json(const Json& j, CalibrationResult& r) {
  r.camera = j.at("camera").get<PinholeCamera>();
  r.rpe_pixels = j.at("rpe_pixels").get<double>();
  r.inlier_views = j.at("inlier_views").get<std::vector<std::string>>();
  r.per_view_poses.clear();
  for (const auto& p : j.at("per_view_poses")) {
    r.per_view_poses.push_back({p.at("view_id").get<std::string>(), p.at("target_to_camera").get<RigidTransform>()});
  }
}

void to_json(Json& j, const HandEyeSummary& h) {
  j = Json::object();
  j["hand_eye"] = h.hand_eye;
  j["compensated"] = h.compensated;
  j["motion_pairs"] = h.motion_pairs;
  j["shaft_offset_mm"] = h.shaft_offset_mm;
  j["rpe_before_px"] = h.rpe_before_px;
  j["rpe_after_px"] = h.rpe_after_px;
  j["rpe_after_mm"] = h.rpe_after_mm;
}

void from_json(const Json& j, HandEyeSummary& h) {
  h.hand_eye = j.at("hand_eye").get<RigidTransform>();
  h.compensated = j.at("compensated").get<RigidTransform>();
  h.motion_pairs = j.at("motion_pairs").get<std::size_t>();
  h.shaft_offset_mm = j.at("shaft_offset_mm").get<double>();
  h.rpe_before_px = j.at("rpe_before_px").get<double>();
  h.rpe_after_px = j.at("rpe_after_px").get<double>();
  h.rpe_after_mm = j.at("rpe_after_mm").get<double>();
}

void to_json(Json& j, const AlignmentResult& a) {
  j = Json::object();
  j["window_id"] = a.window_id;
  j["transform"] = a.transform;
  j["inlier_count"] = a.inlier_count;
  j["pair_count"] = a.pair_count;
  j["rms_residual_mm"] = a.rms_residual;
  if (a.failure) {
    j["failure"] = Json{{"category", a.failure->category}, {"message", a.failure->message}};
  } else {
    j["failure"] = nullptr;
  }
}

void from_json(const Json& j, AlignmentResult& a) {
  a.window_id = j.at("window_id").get<std::string>();
  a.transform = j.at("transform").get<SimilarityTransform>();
  a.inlier_count = j.at("inlier_count").get<std::size_t>();
  a.pair_count = j.at("pair_count").get<std::size_t>();
  a.rms_residual = j.at("rms_residual_mm").get<double>();
  a.inlier_mask.clear();
  if (j.at("failure").is_null()) {
    a.failure.reset();
  } else {
    a.failure = AlignmentFailure{j.at("failure").at("category").get<std::string>(),
                                 j.at("failure").at("message").get<std::string>()};
  }
}

void to_json(Json& j, const TrajError& e) {
  j = Json::object();
  j["trans_rmse_mm"] = e.trans_rmse;
  j["rot_rmse_deg"] = e.rot_rmse;
  Json rows = Json::array();
  for (const auto& s : e.per_sample) rows.push_back(Json::array({s.timestamp, s.trans_err_mm, s.rot_err_deg}));
  j["per_sample"] = std::move(rows);
}

void from_json(const Json& j, TrajError& e) {
  e.trans_rmse = j.at("trans_rmse_mm").get<double>();
  e.rot_rmse = j.at("rot_rmse_deg").get<double>();
  e.per_sample.clear();
  for (const auto& row : j.at("per_sample")) {
    e.per_sample.push_back({row.at(0).get<double>(), row.at(1).get<double>(), row.at(2).get<double>()});
  }
}

void to_json(Json& j, const SmoothnessStats& s) {
  j = Json{{"rms_linear_accel_mm_s2", s.rms_linear_accel}, {"rms_angular_accel_rad_s2", s.rms_angular_accel}};
}

void from_json(const Json& j, SmoothnessStats& s) {
  s.rms_linear_accel = j.at("rms_linear_accel_mm_s2").get<double>();
  s.rms_angular_accel = j.at("rms_angular_accel_rad_s2").get<double>();
}

void to_json(Json& j, const MetricReport& m) {
  j = Json::object();
  put_optional(j, "ate", m.ate);
  put_optional(j, "rte", m.rte);
  put_optional(j, "smoothness_gt", m.smoothness_gt);
  put_optional(j, "smoothness_pred", m.smoothness_pred);
  put_optional(j, "rmse_mm", m.rmse_mm);
  put_optional(j, "hausdorff_mm", m.hausdorff_mm);
  j["psnr_db"] = m.psnr_db ? number_or_inf(*m.psnr_db) : Json(nullptr);
  put_optional(j, "ssim", m.ssim);
}

void from_json(const Json& j, MetricReport& m) {
  get_optional(j, "ate", m.ate);
  get_optional(j, "rte", m.rte);
  get_optional(j, "smoothness_gt", m.smoothness_gt);
  get_optional(j, "smoothness_pred", m.smoothness_pred);
  get_optional(j, "rmse_mm", m.rmse_mm);
  get_optional(j, "hausdorff_mm", m.hausdorff_mm);
  if (j.at("psnr_db").is_null()) {
    m.psnr_db.reset();
  } else {
    m.psnr_db = from_number_or_inf(j.at("psnr_db"));
  }
  get_optional(j, "ssim", m.ssim);
}

void to_json(Json& j, const TrialReport& r) {
  j = Json::object();
  j["schema_version"] = r.schema_version;
  j["toolkit_version"] = r.toolkit_version;
  j["trial"] = r.trial;
  j["command"] = r.command;
  if (r.generated_at) j["generated_at"] = *r.generated_at;
  j["config"] = r.config;
  j["inputs"] = r.inputs;
  j["outputs"] = r.outputs;
  j["warnings"] = r.warnings;
  Json calib = Json::object();
  put_optional(calib, "external", r.calibration.external);
  put_optional(calib, "scope", r.calibration.scope);
  put_optional(calib, "hand_eye", r.calibration.hand_eye);
  j["calibration"] = std::move(calib);
  j["alignment"] = r.alignment;
  j["metrics"] = r.metrics;
}

void from_json(const Json& j, TrialReport& r) {
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != TrialReport::kSchemaVersion) {
    throw Error(ErrorCategory::kFormat, "unsupported report schema version",
                {{"schema_version", std::to_string(r.schema_version)}});
  }
  r.toolkit_version = j.at("toolkit_version").get<std::string>();
  r.trial = j.at("trial").get<std::string>();
  r.command = j.at("command").get<std::string>();
  if (j.contains("generated_at")) {
    r.generated_at = j.at("generated_at").get<std::string>();
  } else {
    r.generated_at.reset();
  }
  r.config = j.at("config");
  r.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
  r.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  const Json& calib = j.at("calibration");
  get_optional(calib, "external", r.calibration.external);
  get_optional(calib, "scope", r.calibration.scope);
  get_optional(calib, "hand_eye", r.calibration.hand_eye);
  r.alignment = j.at("alignment").get<std::vector<AlignmentResult>>();
  r.metrics = j.at("metrics").get<MetricReport>();
}

TrialReport parse_trial_report(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCategory::kParse, std::string("invalid JSON: ") + e.what());
  }
  try {
    return j.get<TrialReport>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCategory::kFormat, std::string("report does not match the schema: ") + e.what());
  }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string csv_header() {
  return "trial,command,ate_trans_mm,ate_rot_deg,rte_trans_mm,rte_rot_deg,"
         "gt_rms_accel_mm_s2,gt_rms_ang_accel_rad_s2,pred_rms_accel_mm_s2,pred_rms_ang_accel_rad_s2,"
         "rmse_mm,hausdorff_mm,psnr_db,ssim,external_rpe_px,scope_rpe_px,hand_eye_rpe_px,hand_eye_rpe_mm\n";
}

std::string csv_row(const TrialReport& r) {
  const MetricReport& m = r.metrics;
  const auto opt = [](bool has, double v) { return has ? std::optional<double>(v) : std::nullopt; };
  const auto& he = r.calibration.hand_eye;
  const std::optional<double> cells[] = {
      opt(m.ate.has_value(), m.ate ? m.ate->trans_rmse : 0.0),
      opt(m.ate.has_value(), m.ate ? m.ate->rot_rmse : 0.0),
      opt(m.rte.has_value(), m.rte ? m.rte->trans_rmse : 0.0),
      opt(m.rte.has_value(), m.rte ? m.rte->rot_rmse : 0.0),
      opt(m.smoothness_gt.has_value(), m.smoothness_gt ? m.smoothness_gt->rms_linear_accel : 0.0),
      opt(m.smoothness_gt.has_value(), m.smoothness_gt ? m.smoothness_gt->rms_angular_accel : 0.0),
      opt(m.smoothness_pred.has_value(), m.smoothness_pred ? m.smoothness_pred->rms_linear_accel : 0.0),
      opt(m.smoothness_pred.has_value(), m.smoothness_pred ? m.smoothness_pred->rms_angular_accel : 0.0),
      m.rmse_mm,
      m.hausdorff_mm,
      m.psnr_db,
      m.ssim,
      opt(r.calibration.external.has_value(), r.calibration.external ? r.calibration.external->rpe_pixels : 0.0),
      opt(r.calibration.scope.has_value(), r.calibration.scope ? r.calibration.scope->rpe_pixels : 0.0),
      opt(he.has_value(), he ? he->rpe_after_px : 0.0),
      opt(he.has_value(), he ? he->rpe_after_mm : 0.0),
  };
  std::string row = r.trial + "," + r.command;
  for (const auto& c : cells) row += "," + csv_number(c);
  return row + "\n";
}

}  // namespace arthro
