#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "arthro/pipeline.h"

namespace arthro::detail {

struct CommandContext {
  std::string command;
  std::filesystem::path out;
  Json config;  // fully merged; echoed into reports
  std::uint64_t seed = 7;
  LengthUnit unit = LengthUnit::kMillimetre;
  bool deterministic = false;
  std::string trial = "trial";
  std::map<std::string, std::string> paths;  // --flag overrides of input files
  std::vector<std::string> trial_dirs;       // report
};

void run_simulate(const CommandContext& ctx);
void run_calibrate(const CommandContext& ctx);
void run_handeye(const CommandContext& ctx);
void run_align(const CommandContext& ctx);
void run_eval_traj(const CommandContext& ctx);
void run_eval_recon(const CommandContext& ctx);
void run_report(const CommandContext& ctx);

}  // namespace arthro::detail
