#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "arthro/io.h"
#include "arthro/pipeline.h"
#include "oracles.h"

namespace arthro {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("arthro_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& rel) const { return (dir_ / rel).string(); }
  fs::path dir_;
};

Json error_json(const CliRun& r) { return Json::parse(r.err.substr(0, r.err.find('\n'))); }

TEST_F(CliTest, EvalReconOnIdenticalCloudsIsZero) {
  Rng rng(1);
  PointCloud c;
  c.points = oracle::random_cloud(rng, 200);
  write_file(path("a.ply"), write_ply(c));
  write_file(path("b.ply"), write_ply(c));
  const CliRun r = run({"--out", dir_.string(), "--deterministic", "eval-recon", "--recon", path("a.ply"), "--ref",
                     path("b.ply")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "eval-recon: ok\n");
  const TrialReport rep = parse_trial_report(read_file(path("reports/eval-recon.json")));
  EXPECT_EQ(*rep.metrics.rmse_mm, 0.0);
  EXPECT_EQ(*rep.metrics.hausdorff_mm, 0.0);
  EXPECT_FALSE(rep.generated_at);
  EXPECT_TRUE(rep.config.contains("eval_recon"));
}

TEST_F(CliTest, MissingInputIsIoError) {
  const CliRun r = run({"--out", dir_.string(), "eval-traj"});
  EXPECT_EQ(r.code, 4);
  const Json e = error_json(r);
  EXPECT_EQ(e["error"]["category"], "io");
  EXPECT_EQ(e["error"]["exit_code"], 4);
  EXPECT_TRUE(e["error"]["context"].contains("path"));
}

TEST_F(CliTest, UsageErrorsAreInputErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  const CliRun r = run({"--unit", "cm", "report"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(error_json(r)["error"]["category"], "input");
}

TEST_F(CliTest, ConfigErrors) {
  write_file(path("bad.json"), R"({"align": {"no_such_key": 1}})");
  CliRun r = run({"--config", path("bad.json"), "--out", dir_.string(), "simulate"});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(error_json(r)["error"]["context"]["key"], "align.no_such_key");
  write_file(path("broken.json"), "{");
  r = run({"--config", path("broken.json"), "--out", dir_.string(), "simulate"});
  EXPECT_EQ(r.code, 3);
}

TEST_F(CliTest, MalformedTrajectoryIsParseError) {
  write_file(path("est.tum"), "0 0 0 0 0 0 0 1\n0.1 oops\n");
  write_file(path("gt.tum"), "0 0 0 0 0 0 0 1\n0.1 0 0 0 0 0 0 1\n");
  const CliRun r = run({"--out", dir_.string(), "eval-traj", "--est", path("est.tum"), "--gt", path("gt.tum")});
  EXPECT_EQ(r.code, 10);
  const Json e = error_json(r);
  EXPECT_EQ(e["error"]["category"], "parse");
  EXPECT_EQ(e["error"]["context"]["line"], "2");
}

TEST_F(CliTest, VersionFlag) {
  const CliRun r = run({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
}

TEST_F(CliTest, FullPipelineThenNoOverlapAlign) {
  const std::vector<std::string> base{"--out", dir_.string(), "--deterministic"};
  for (const char* cmd : {"simulate", "calibrate", "handeye", "align", "eval-traj", "eval-recon", "report"}) {
    std::vector<std::string> args = base;
    args.emplace_back(cmd);
    const CliRun r = run(args);
    ASSERT_EQ(r.code, 0) << cmd << ": " << r.err;
  }
  const TrialReport rep = parse_trial_report(read_file(path("report.json")));
  ASSERT_TRUE(rep.metrics.ate);
  EXPECT_LT(rep.metrics.ate->trans_rmse, 0.01);
  EXPECT_LT(*rep.metrics.rmse_mm, 0.01);
  EXPECT_EQ(rep.alignment.size(), 3u);
  EXPECT_TRUE(rep.calibration.hand_eye);
  EXPECT_TRUE(fs::exists(path("report.csv")));

  // External track that starts after every window has ended.
  std::string late = "# unit: mm\n";
  for (int i = 0; i < 10; ++i) late += std::to_string(100 + i) + " 0 0 0 0 0 0 1\n";
  write_file(path("late.tum"), late);
  std::vector<std::string> args = base;
  args.insert(args.end(), {"align", "--external", path("late.tum")});
  const CliRun r = run(args);
  EXPECT_EQ(r.code, 41);
  EXPECT_EQ(error_json(r)["error"]["category"], "no-overlap");
}

}  // namespace
}  // namespace arthro
