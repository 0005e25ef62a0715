#include "commands.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <set>

#include <spdlog/spdlog.h>

#include "arthro/error.h"
#include "arthro/io.h"

namespace arthro::detail {
namespace {

namespace fs = std::filesystem;

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string section_of(const std::string& command) {
  std::string s = command;
  for (auto& c : s) {
    if (c == '-') c = '_';
  }
  return s;
}

TrialReport new_report(const CommandContext& ctx) {
  TrialReport r;
  r.toolkit_version = ARTHRO_VERSION;
  r.trial = ctx.trial;
  r.command = ctx.command;
  if (!ctx.deterministic) r.generated_at = utc_now();
  const std::string section = section_of(ctx.command);
  r.config = Json{{"seed", ctx.seed}, {"unit", std::string(unit_name(ctx.unit))}};
  if (ctx.config.contains(section)) r.config[section] = ctx.config.at(section);
  return r;
}

std::string display_path(const CommandContext& ctx, const fs::path& p) {
  const fs::path rel = fs::absolute(p).lexically_normal().lexically_relative(fs::absolute(ctx.out).lexically_normal());
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return p.generic_string();
}

fs::path input(const CommandContext& ctx, TrialReport& r, const std::string& key, const char* default_rel) {
  const auto it = ctx.paths.find(key);
  const fs::path p = it != ctx.paths.end() ? fs::path(it->second) : ctx.out / default_rel;
  r.inputs[key] = display_path(ctx, p);
  return p;
}

void output(const CommandContext& ctx, TrialReport& r, const std::string& key, const char* rel,
            std::string_view contents) {
  const fs::path p = ctx.out / rel;
  fs::create_directories(p.parent_path());
  write_file(p.string(), contents);
  r.outputs[key] = rel;
}

Json load_json(const fs::path& p) {
  const std::string text = read_file(p.string());
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCategory::kParse, std::string("invalid JSON: ") + e.what(), {{"path", p.generic_string()}});
  }
}

Trajectory load_tum(const CommandContext& ctx, TrialReport& r, const fs::path& p) {
  std::vector<std::string> warnings;
  Trajectory t = parse_tum(read_file(p.string()), ctx.unit, &warnings).converted_to(LengthUnit::kMillimetre);
  for (const auto& w : warnings) {
    spdlog::warn("{}: {}", p.generic_string(), w);
    r.warnings.push_back(display_path(ctx, p) + ": " + w);
  }
  return t;
}

PointCloud load_ply(const CommandContext& ctx, const fs::path& p) { return parse_ply(read_file(p.string()), ctx.unit); }

void write_stage_report(const CommandContext& ctx, const TrialReport& r) {
  const fs::path dir = ctx.out / layout::kReports;
  fs::create_directories(dir);
  write_file((dir / (ctx.command + ".json")).string(), dump_json(r));
  write_file((dir / (ctx.command + ".csv")).string(), csv_header() + csv_row(r));
  spdlog::info("{}: report written to {}", ctx.command, (dir / (ctx.command + ".json")).generic_string());
}

Vec3 vec3(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCategory::kConfig, "expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

void run_simulate(const CommandContext& ctx) {
  TrialReport report = new_report(ctx);
  const Json& sec = ctx.config.at("simulate");
  const std::string preset = sec.at("preset").get<std::string>();
  if (preset != "noiseless" && preset != "noisy") {
    throw Error(ErrorCategory::kConfig, "simulate.preset must be 'noiseless' or 'noisy'", {{"preset", preset}});
  }
  auto cfg = sim::ScenarioConfig::defaults(preset == "noisy");

  const Json& noise = sec.at("noise");
  cfg.noise.pixel_sigma = noise.at("pixel_sigma").get<double>();
  cfg.noise.pos_sigma = noise.at("pos_sigma").get<double>();
  cfg.noise.rot_sigma = noise.at("rot_sigma").get<double>();
  cfg.noise.outlier_fraction = noise.at("outlier_fraction").get<double>();
  cfg.noise.outlier_magnitude = noise.at("outlier_magnitude").get<double>();
  cfg.noise.seed = ctx.seed;

  const Json& traj = sec.at("trajectory");
  const std::string kind = traj.at("kind").get<std::string>();
  if (kind != "lissajous" && kind != "screw") {
    throw Error(ErrorCategory::kConfig, "simulate.trajectory.kind must be 'lissajous' or 'screw'", {{"kind", kind}});
  }
  cfg.trajectory.kind = kind == "screw" ? sim::TrajectoryKind::kScrew : sim::TrajectoryKind::kLissajous;
  cfg.trajectory.duration_s = traj.at("duration_s").get<double>();
  cfg.trajectory.rate_hz = traj.at("rate_hz").get<double>();
  cfg.trajectory.amplitude_mm = traj.at("amplitude_mm").get<double>();
  cfg.trajectory.omega_rad_s = traj.at("omega_rad_s").get<double>();
  cfg.trajectory.wobble_rad = traj.at("wobble_rad").get<double>();
  if (!(cfg.trajectory.duration_s > 0.0) || !(cfg.trajectory.rate_hz > 0.0)) {
    throw Error(ErrorCategory::kConfig, "trajectory duration and rate must be positive");
  }

  cfg.windows.clear();
  for (const auto& w : sec.at("windows")) {
    if (!w.is_array() || w.size() != 2) throw Error(ErrorCategory::kConfig, "windows must be [t_start, t_end] pairs");
    cfg.windows.push_back({w[0].get<double>(), w[1].get<double>()});
  }
  cfg.window_scales = sec.at("window_scales").get<std::vector<double>>();
  if (cfg.window_scales.size() != cfg.windows.size()) {
    throw Error(ErrorCategory::kConfig, "window_scales needs one entry per window");
  }
  for (const double s : cfg.window_scales) {
    if (!(s > 0.0)) throw Error(ErrorCategory::kConfig, "window scales must be positive");
  }
  cfg.local_maps.points_per_window = sec.at("points_per_window").get<std::size_t>();

  const Json& surf = sec.at("surface");
  const std::string shape = surf.at("shape").get<std::string>();
  if (shape != "sphere_patch" && shape != "ellipsoid_patch") {
    throw Error(ErrorCategory::kConfig, "surface.shape must be 'sphere_patch' or 'ellipsoid_patch'", {{"shape", shape}});
  }
  cfg.surface.shape = shape == "sphere_patch" ? sim::SurfaceShape::kSpherePatch : sim::SurfaceShape::kEllipsoidPatch;
  cfg.surface.radius_mm = surf.at("radius_mm").get<double>();
  cfg.surface.extent_deg = surf.at("extent_deg").get<double>();
  cfg.surface.density_per_mm2 = surf.at("density_per_mm2").get<double>();
  cfg.surface.noise_sigma_mm = surf.at("noise_sigma_mm").get<double>();
  cfg.surface.seed = ctx.seed;
  cfg.trajectory.seed = ctx.seed;

  cfg.external_views = sec.at("external_views").get<std::size_t>();
  cfg.scope_views = sec.at("scope_views").get<std::size_t>();
  cfg.shaft_validation_views = sec.at("shaft_validation_views").get<std::size_t>();

  const sim::SimScenario s = sim::make_scenario(cfg);
  spdlog::info("simulate: {} samples, {} windows, {} surface points", s.gt_scope.size(), s.local_windows.size(),
               s.surface.points.size());
  write_scenario(s, ctx.out.string(), ctx.unit, report.config);
  for (const char* rel : {layout::kScenario, layout::kGtScope, layout::kGtExternal, layout::kExternal,
                          layout::kScopeMeasured, layout::kSurface, layout::kExternalViews, layout::kScopeViews,
                          layout::kShaftValidation, layout::kReferenceImage, layout::kRenderedImage}) {
    report.outputs[rel] = rel;
  }
  for (const auto& w : s.local_windows) {
    for (const char* ext : {".tum", ".ply"}) {
      const std::string rel = std::string(layout::kWindows) + "/" + w.window_id + ext;
      report.outputs[rel] = rel;
    }
  }
  write_stage_report(ctx, report);
}

void run_calibrate(const CommandContext& ctx) {
  TrialReport report = new_report(ctx);
  const Json& sec = ctx.config.at("calibrate");
  ViewSelectionConfig vs;
  vs.min_sample = sec.at("min_sample").get<std::size_t>();
  vs.iterations = sec.at("iterations").get<std::size_t>();
  vs.inlier_rpe_threshold = sec.at("inlier_rpe_threshold_px").get<double>();
  vs.threads = sec.at("threads").get<unsigned>();
  vs.refinement.max_iterations = sec.at("lm_max_iterations").get<int>();
  vs.refinement.relative_tolerance = sec.at("lm_relative_tolerance").get<double>();
  vs.seed = ctx.seed;

  const auto calibrate_one = [&](const std::string& key, const char* views_rel, const char* out_rel) {
    const ViewSet set = view_set_from_json(load_json(input(ctx, report, key, views_rel)));
    CalibrationResult result = ransac_select_views(set.target, set.views, set.width, set.height, vs);
    const std::set<std::string> kept(result.inlier_views.begin(), result.inlier_views.end());
    for (const auto& v : set.views) {
      if (!kept.count(v.view_id)) report.warnings.push_back(key + ": view " + v.view_id + " rejected by RANSAC");
    }
    spdlog::info("calibrate {}: rpe {:.4f} px over {}/{} views", key, result.rpe_pixels, kept.size(),
                 set.views.size());
    output(ctx, report, key + "_camera", out_rel, dump_json(Json(result)));
    return result;
  };
  report.calibration.external = calibrate_one("external", layout::kExternalViews, layout::kExternalCamera);
  report.calibration.scope = calibrate_one("scope", layout::kScopeViews, layout::kScopeCamera);
  write_stage_report(ctx, report);
}

void run_handeye(const CommandContext& ctx) {
  TrialReport report = new_report(ctx);
  const Json& sec = ctx.config.at("handeye");
  const Trajectory ext = load_tum(ctx, report, input(ctx, report, "external", layout::kExternal));
  const Trajectory scope = load_tum(ctx, report, input(ctx, report, "scope", layout::kScopeMeasured));

  const std::size_t stride = sec.at("stride").get<std::size_t>();
  if (stride == 0) throw Error(ErrorCategory::kConfig, "handeye.stride must be positive");
  const auto pairs = motion_pairs_from_tracks(ext, scope, stride, sec.at("max_dt_s").get<double>(),
                                              sec.at("min_rotation_deg").get<double>());
  HandEyeOptions opts;
  opts.similar_motion_tolerance_deg = sec.at("similar_motion_tolerance_deg").get<double>();
  opts.min_axis_separation_deg = sec.at("min_axis_separation_deg").get<double>();

  HandEyeSummary summary;
  summary.motion_pairs = pairs.size();
  summary.hand_eye = solve_hand_eye(pairs, opts);
  summary.compensated = summary.hand_eye;

  if (sec.at("shaft_compensation").get<bool>()) {
    const CalibrationResult cam =
        load_json(input(ctx, report, "scope_camera", layout::kScopeCamera)).get<CalibrationResult>();
    PlanarTarget target(1, 1, 1.0);
    const auto validation =
        shaft_validation_from_json(load_json(input(ctx, report, "shaft_validation", layout::kShaftValidation)), target);
    Vec3 axis = vec3(sec.at("shaft_axis"));
    if (std::abs(axis.norm() - 1.0) > 1e-9) {
      throw Error(ErrorCategory::kConfig, "handeye.shaft_axis must be a unit vector");
    }
    ShaftSearchOptions search;
    search.lower_mm = sec.at("search_lower_mm").get<double>();
    search.upper_mm = sec.at("search_upper_mm").get<double>();
    search.tolerance_mm = sec.at("search_tolerance_mm").get<double>();
    const ShaftCompensation comp =
        compensate_shaft_offset(summary.hand_eye, axis, cam.camera, target, validation, search);
    summary.compensated = comp.hand_eye;
    summary.shaft_offset_mm = comp.offset_mm;
    summary.rpe_before_px = comp.rpe_before;
    summary.rpe_after_px = comp.rpe_after;

    double depth = 0.0;
    std::size_t n = 0;
    for (const auto& v : validation) {
      const RigidTransform target_to_camera = invert(compose(v.external_pose, comp.hand_eye));
      for (const auto& p : target.corners()) {
        depth += (target_to_camera * p).z();
        ++n;
      }
    }
    summary.rpe_after_mm =
        rpe_pixels_to_mm(comp.rpe_after, 0.5 * (cam.camera.fx + cam.camera.fy), depth / static_cast<double>(n));
  }
  spdlog::info("handeye: {} motion pairs, shaft offset {:.4f} mm, rpe {:.4f} -> {:.4f} px", summary.motion_pairs,
               summary.shaft_offset_mm, summary.rpe_before_px, summary.rpe_after_px);
  report.calibration.hand_eye = summary;
  output(ctx, report, "hand_eye", layout::kHandEye, dump_json(Json(summary)));
  write_stage_report(ctx, report);
}

void run_align(const CommandContext& ctx) {
  TrialReport report = new_report(ctx);
  const Json& sec = ctx.config.at("align");
  AlignConfig cfg;
  cfg.max_dt = sec.at("max_dt_s").get<double>();
  cfg.robust.iterations = sec.at("ransac_iterations").get<std::size_t>();
  cfg.robust.inlier_threshold_mm = sec.at("inlier_threshold_mm").get<double>();
  cfg.robust.seed = ctx.seed;

  GlobalTrack g;
  g.trajectory = load_tum(ctx, report, input(ctx, report, "external", layout::kExternal));
  g.hand_eye = load_json(input(ctx, report, "hand_eye", layout::kHandEye)).get<HandEyeSummary>().compensated;

  const fs::path dir = input(ctx, report, "windows", layout::kWindows);
  if (!fs::is_directory(dir)) throw Error(ErrorCategory::kIo, "windows directory not found", {{"path", dir.string()}});
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".tum") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorCategory::kInsufficientData, "no window trajectories found", {{"path", dir.string()}});

  std::vector<LocalMap> windows;
  for (const auto& f : files) {
    LocalMap m;
    m.window_id = f.stem().string();
    m.trajectory = load_tum(ctx, report, f);
    fs::path ply = f;
    ply.replace_extension(".ply");
    if (fs::exists(ply)) m.points = load_ply(ctx, ply);
    windows.push_back(std::move(m));
  }

  const bool any_overlap = std::any_of(windows.begin(), windows.end(), [&](const LocalMap& m) {
    return !m.trajectory.empty() && !g.trajectory.empty() && m.trajectory.start_time() <= g.trajectory.end_time() &&
           m.trajectory.end_time() >= g.trajectory.start_time();
  });
  if (!any_overlap) {
    throw Error(ErrorCategory::kNoOverlap, "no window overlaps the external trajectory in time",
                {{"windows", std::to_string(windows.size())}});
  }
  const GlobalModel model = fuse_local_maps(windows, g, cfg);
  for (const auto& a : model.per_window) {
    if (a.failure) {
      spdlog::warn("align: window {} failed ({}): {}", a.window_id, a.failure->category, a.failure->message);
      report.warnings.push_back("window " + a.window_id + " excluded: " + a.failure->category + ": " +
                                a.failure->message);
    } else {
      spdlog::info("align: window {} scale {:.6f}, {}/{} inliers, rms {:.4f} mm", a.window_id, a.transform.scale,
                   a.inlier_count, a.pair_count, a.rms_residual);
    }
  }
  report.alignment = model.per_window;
  output(ctx, report, "trajectory", layout::kFusedTrajectory, write_tum(model.fused_trajectory.converted_to(ctx.unit)));
  output(ctx, report, "points", layout::kFusedPoints, write_ply(model.fused_points, ctx.unit));
  write_stage_report(ctx, report);
}

void run_eval_traj(const CommandContext& ctx) {
  TrialReport report = new_report(ctx);
  const Json& sec = ctx.config.at("eval_traj");
  const Trajectory est = load_tum(ctx, report, input(ctx, report, "est", layout::kFusedTrajectory));
  const Trajectory gt = load_tum(ctx, report, input(ctx, report, "gt", layout::kGtScope));

  const std::string mode_name = sec.at("ate_mode").get<std::string>();
  AteAlignment mode;
  if (mode_name == "none") {
    mode = AteAlignment::kNone;
  } else if (mode_name == "rigid") {
    mode = AteAlignment::kRigid;
  } else if (mode_name == "similarity") {
    mode = AteAlignment::kSimilarity;
  } else {
    throw Error(ErrorCategory::kConfig, "eval_traj.ate_mode must be none, rigid or similarity", {{"mode", mode_name}});
  }
  const double max_dt = sec.at("max_dt_s").get<double>();
  const double resample_dt = sec.at("resample_dt_s").get<double>();
  report.metrics.ate = ate(est, gt, mode, max_dt);
  report.metrics.rte = rte(est, gt, sec.at("rte_delta").get<std::size_t>(), max_dt);
  report.metrics.smoothness_gt = smoothness(gt, resample_dt);
  report.metrics.smoothness_pred = smoothness(est, resample_dt);
  spdlog::info("eval-traj: ATE {:.6f} mm / {:.6f} deg, RTE {:.6f} mm / {:.6f} deg", report.metrics.ate->trans_rmse,
               report.metrics.ate->rot_rmse, report.metrics.rte->trans_rmse, report.metrics.rte->rot_rmse);
  write_stage_report(ctx, report);
}

void run_eval_recon(const CommandContext& ctx) {
  TrialReport report = new_report(ctx);
  const Json& sec = ctx.config.at("eval_recon");
  PointCloud recon = load_ply(ctx, input(ctx, report, "recon", layout::kFusedPoints));
  const PointCloud ref = load_ply(ctx, input(ctx, report, "ref", layout::kSurface));
  if (recon.points.empty() || ref.points.empty()) {
    throw Error(ErrorCategory::kInsufficientData, "point clouds must be non-empty");
  }

  if (!sec.at("skip_icp").get<bool>()) {
    IcpConfig icp;
    icp.max_iterations = sec.at("icp_max_iterations").get<int>();
    icp.tolerance_mm = sec.at("icp_tolerance_mm").get<double>();
    const IcpResult res = icp_rigid(recon, ref, icp);
    if (!res.converged) {
      report.warnings.push_back("icp stopped after " + std::to_string(res.iterations) + " iterations without converging");
    }
    for (auto& p : recon.points) p = res.transform * p;
  }
  report.metrics.rmse_mm = nn_rmse(recon, ref);
  report.metrics.hausdorff_mm = hausdorff(recon, ref);

  const bool explicit_images = ctx.paths.count("rendered") || ctx.paths.count("reference");
  const fs::path rendered = ctx.paths.count("rendered") ? fs::path(ctx.paths.at("rendered")) : ctx.out / layout::kRenderedImage;
  const fs::path reference =
      ctx.paths.count("reference") ? fs::path(ctx.paths.at("reference")) : ctx.out / layout::kReferenceImage;
  if (explicit_images || (fs::exists(rendered) && fs::exists(reference))) {
    const Image a = parse_image(read_file(input(ctx, report, "rendered", layout::kRenderedImage).string()));
    const Image b = parse_image(read_file(input(ctx, report, "reference", layout::kReferenceImage).string()));
    report.metrics.psnr_db = psnr(a, b);
    report.metrics.ssim = ssim(a, b);
  }
  spdlog::info("eval-recon: rmse {:.6f} mm, hausdorff {:.6f} mm", *report.metrics.rmse_mm, *report.metrics.hausdorff_mm);
  write_stage_report(ctx, report);
}

void run_report(const CommandContext& ctx) {
  static const char* const kStages[] = {"simulate", "calibrate", "handeye", "align", "eval-traj", "eval-recon"};
  std::vector<fs::path> dirs;
  for (const auto& d : ctx.trial_dirs) dirs.emplace_back(d);
  if (dirs.empty()) dirs.push_back(ctx.out);

  std::string csv = csv_header();
  for (const auto& dir : dirs) {
    TrialReport merged;
    merged.toolkit_version = ARTHRO_VERSION;
    merged.command = "report";
    if (!ctx.deterministic) merged.generated_at = utc_now();
    merged.trial.clear();
    std::size_t found = 0;
    for (const char* stage : kStages) {
      const fs::path p = dir / layout::kReports / (std::string(stage) + ".json");
      if (!fs::exists(p)) continue;
      ++found;
      const TrialReport r = parse_trial_report(read_file(p.string()));
      if (merged.trial.empty()) merged.trial = r.trial;
      const std::string section = section_of(stage);
      merged.config[section] = r.config;
      for (const auto& [k, v] : r.inputs) merged.inputs[section + "." + k] = v;
      for (const auto& [k, v] : r.outputs) merged.outputs[section + "." + k] = v;
      for (const auto& w : r.warnings) merged.warnings.push_back(std::string(stage) + ": " + w);
      if (r.calibration.external) merged.calibration.external = r.calibration.external;
      if (r.calibration.scope) merged.calibration.scope = r.calibration.scope;
      if (r.calibration.hand_eye) merged.calibration.hand_eye = r.calibration.hand_eye;
      if (!r.alignment.empty()) merged.alignment = r.alignment;
      const MetricReport& m = r.metrics;
      if (m.ate) merged.metrics.ate = m.ate;
      if (m.rte) merged.metrics.rte = m.rte;
      if (m.smoothness_gt) merged.metrics.smoothness_gt = m.smoothness_gt;
      if (m.smoothness_pred) merged.metrics.smoothness_pred = m.smoothness_pred;
      if (m.rmse_mm) merged.metrics.rmse_mm = m.rmse_mm;
      if (m.hausdorff_mm) merged.metrics.hausdorff_mm = m.hausdorff_mm;
      if (m.psnr_db) merged.metrics.psnr_db = m.psnr_db;
      if (m.ssim) merged.metrics.ssim = m.ssim;
    }
    if (found == 0) {
      throw Error(ErrorCategory::kInsufficientData, "no stage reports found", {{"path", dir.generic_string()}});
    }
    if (merged.trial.empty()) merged.trial = ctx.trial;
    write_file((dir / "report.json").string(), dump_json(merged));
    csv += csv_row(merged);
  }
  fs::create_directories(ctx.out);
  write_file((ctx.out / "report.csv").string(), csv);
  spdlog::info("report: {} trial(s) summarized in {}", dirs.size(), (ctx.out / "report.csv").generic_string());
}

}  // namespace arthro::detail
