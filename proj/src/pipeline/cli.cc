#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "arthro/error.h"
#include "arthro/io.h"
#include "commands.h"

namespace arthro {
namespace {

void setup_logging() {
  static const bool once = [] {
    auto logger = spdlog::stderr_logger_mt("arthro-rig");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    return true;
  }();
  (void)once;
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("ARTHRO_RIG_LOG")) {
    const std::string v = env;
    if (v == "error") {
      level = spdlog::level::err;
    } else if (v == "warn") {
      level = spdlog::level::warn;
    } else if (v == "info") {
      level = spdlog::level::info;
    } else if (v == "debug") {
      level = spdlog::level::debug;
    } else {
      spdlog::warn("ignoring ARTHRO_RIG_LOG='{}' (expected error, warn, info or debug)", v);
    }
  }
  spdlog::set_level(level);
}

int report_error(std::ostream& err, const std::string& category, int code, const std::string& message,
                 const Error::Context& context = {}) {
  Json j = Json::object();
  j["error"] = Json{{"category", category}, {"exit_code", code}, {"message", message}, {"context", context}};
  err << j.dump() << "\n";
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  setup_logging();

  CLI::App app{"Calibration, scale-recovery fusion and evaluation for an arthroscope + external camera rig",
               "arthro-rig"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", ARTHRO_VERSION);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> unit;
  bool deterministic = false;
  std::string out_dir = ".";
  std::string trial = "trial";
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "seed for every stochastic stage (default 7)");
  app.add_option("--unit", unit, "length unit of written files and of input files without a unit header")
      ->check(CLI::IsMember({"mm", "m"}));
  app.add_flag("--deterministic", deterministic, "omit wall-clock timestamps from reports");
  app.add_option("--out", out_dir, "workspace directory")->capture_default_str();
  app.add_option("--trial", trial, "trial name recorded in reports")->capture_default_str();
  app.fallthrough();

  std::map<std::string, std::string> paths;
  const auto path_opt = [&paths](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(flag, [&paths, key](const std::string& v) { paths[key] = v; }, help);
  };

  std::optional<std::string> preset;
  auto* simulate = app.add_subcommand("simulate", "write a synthetic rig scenario into the workspace");
  simulate->add_option("--preset", preset, "noise preset")->check(CLI::IsMember({"noiseless", "noisy"}));

  auto* calibrate = app.add_subcommand("calibrate", "intrinsic calibration of both cameras with RANSAC view selection");
  path_opt(calibrate, "--external-views", "external", "external camera target detections (JSON)");
  path_opt(calibrate, "--scope-views", "scope", "arthroscope target detections (JSON)");

  auto* handeye = app.add_subcommand("handeye", "hand-eye calibration and shaft-offset compensation");
  path_opt(handeye, "--external", "external", "external camera trajectory (TUM)");
  path_opt(handeye, "--scope", "scope", "metric arthroscope trajectory (TUM)");
  path_opt(handeye, "--scope-camera", "scope_camera", "arthroscope calibration result (JSON)");
  path_opt(handeye, "--shaft-validation", "shaft_validation", "shaft validation views (JSON)");

  auto* align = app.add_subcommand("align", "register local maps into the global metric frame and fuse them");
  path_opt(align, "--external", "external", "external camera trajectory (TUM)");
  path_opt(align, "--hand-eye", "hand_eye", "hand-eye result (JSON)");
  path_opt(align, "--windows", "windows", "directory of window TUM/PLY pairs");

  auto* eval_traj = app.add_subcommand("eval-traj", "ATE, RTE and smoothness of an estimated trajectory");
  path_opt(eval_traj, "--est", "est", "estimated trajectory (TUM)");
  path_opt(eval_traj, "--gt", "gt", "ground-truth trajectory (TUM)");

  bool skip_icp = false;
  auto* eval_recon = app.add_subcommand("eval-recon", "RMSE, Hausdorff, PSNR and SSIM of a reconstruction");
  path_opt(eval_recon, "--recon", "recon", "reconstructed points (PLY)");
  path_opt(eval_recon, "--ref", "ref", "reference surface (PLY)");
  path_opt(eval_recon, "--rendered", "rendered", "rendered image (PGM/PPM)");
  path_opt(eval_recon, "--reference", "reference", "reference image (PGM/PPM)");
  eval_recon->add_flag("--skip-icp", skip_icp, "score the reconstruction without ICP pre-registration");

  std::vector<std::string> trial_dirs;
  auto* report = app.add_subcommand("report", "merge stage reports into one report per trial plus a CSV table");
  report->add_option("trials", trial_dirs, "trial workspaces (default: --out)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    return report_error(err, std::string(category_name(ErrorCategory::kInput)), exit_code(ErrorCategory::kInput),
                        e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  detail::CommandContext ctx;
  ctx.command = sub->get_name();
  try {
    Json user = Json::object();
    if (!config_path.empty()) {
      try {
        user = Json::parse(read_file(config_path));
      } catch (const Json::parse_error& e) {
        throw Error(ErrorCategory::kConfig, std::string("configuration is not valid JSON: ") + e.what(),
                    {{"path", config_path}});
      }
      if (!user.is_object()) throw Error(ErrorCategory::kConfig, "configuration must be a JSON object");
    }
    std::string effective_preset = "noiseless";
    if (user.contains("simulate") && user["simulate"].is_object() && user["simulate"].contains("preset") &&
        user["simulate"]["preset"].is_string()) {
      effective_preset = user["simulate"]["preset"].get<std::string>();
    }
    if (preset) effective_preset = *preset;
    ctx.config = merge_config(default_config(effective_preset), user);
    ctx.config["simulate"]["preset"] = effective_preset;
    if (seed) ctx.config["seed"] = *seed;
    if (unit) ctx.config["unit"] = *unit;
    if (skip_icp) ctx.config["eval_recon"]["skip_icp"] = true;

    ctx.seed = ctx.config.at("seed").get<std::uint64_t>();
    try {
      ctx.unit = parse_unit(ctx.config.at("unit").get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorCategory::kConfig, e.what());
    }
    ctx.out = out_dir;
    ctx.deterministic = deterministic;
    ctx.trial = trial;
    ctx.paths = paths;
    ctx.trial_dirs = trial_dirs;
    std::filesystem::create_directories(ctx.out);

    spdlog::debug("{}: workspace {}", ctx.command, ctx.out.generic_string());
    if (ctx.command == "simulate") {
      detail::run_simulate(ctx);
    } else if (ctx.command == "calibrate") {
      detail::run_calibrate(ctx);
    } else if (ctx.command == "handeye") {
      detail::run_handeye(ctx);
    } else if (ctx.command == "align") {
      detail::run_align(ctx);
    } else if (ctx.command == "eval-traj") {
      detail::run_eval_traj(ctx);
    } else if (ctx.command == "eval-recon") {
      detail::run_eval_recon(ctx);
    } else {
      detail::run_report(ctx);
    }
  } catch (const Error& e) {
    spdlog::error("{}: {}", ctx.command, e.what());
    return report_error(err, std::string(category_name(e.category())), exit_code(e.category()), e.what(),
                        e.context());
  } catch (const Json::exception& e) {
    return report_error(err, std::string(category_name(ErrorCategory::kFormat)), exit_code(ErrorCategory::kFormat),
                        std::string("document does not match the expected schema: ") + e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return report_error(err, std::string(category_name(ErrorCategory::kIo)), exit_code(ErrorCategory::kIo), e.what(),
                        {{"path", e.path1().generic_string()}});
  } catch (const std::exception& e) {
    return report_error(err, "internal", 1, e.what());
  }
  out << ctx.command << ": ok\n";
  return 0;
}

}  // namespace arthro
