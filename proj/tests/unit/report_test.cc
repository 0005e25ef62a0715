#include <gtest/gtest.h>

#include <algorithm>
#include <limits>

#include "arthro/error.h"
#include "arthro/pipeline.h"
#include "arthro/report.h"
#include "arthro/simulator.h"

namespace arthro {
namespace {

TrialReport sample_report() {
  TrialReport r;
  r.toolkit_version = "0.1.0";
  r.trial = "t1";
  r.command = "report";
  r.generated_at = "2026-01-01T00:00:00Z";
  r.config = default_config();
  r.inputs["gt"] = "tracks/gt_scope.tum";
  r.outputs["report"] = "reports/report.json";
  r.warnings = {"window w1: no-overlap"};

  CalibrationResult cal;
  cal.camera = {400.5, 401.25, 320.125, 240.0625, -0.12, 0.02, 640, 480};
  cal.per_view_poses.push_back({"v00", {Rotation::from_axis_angle(Vec3(1, 2, 3), 0.4), Vec3(1.5, -2, 30)}});
  cal.rpe_pixels = 0.4871;
  cal.inlier_views = {"v00"};
  r.calibration.scope = cal;
  HandEyeSummary he;
  he.hand_eye = {Rotation::from_axis_angle(Vec3(0, 1, 0), 0.3), Vec3(35, -42, 160)};
  he.compensated = he.hand_eye;
  he.compensated.translation.z() += 0.1;
  he.motion_pairs = 39;
  he.shaft_offset_mm = 0.1;
  he.rpe_before_px = 6.5;
  he.rpe_after_px = 6.25;
  he.rpe_after_mm = 0.3;
  r.calibration.hand_eye = he;

  AlignmentResult a;
  a.transform = {10.0, Rotation::from_axis_angle(Vec3(0, 0, 1), 1.0), Vec3(3, 2, 1)};
  a.inlier_count = 200;
  a.pair_count = 226;
  a.rms_residual = 0.51;
  a.window_id = "w0";
  AlignmentResult failed;
  failed.window_id = "w1";
  failed.failure = AlignmentFailure{"no-overlap", "trajectories share no time overlap"};
  r.alignment = {a, failed};

  TrajError ate;
  ate.trans_rmse = 0.5;
  ate.rot_rmse = 0.1;
  ate.per_sample.push_back({0.0, 0.5, 0.1});
  r.metrics.ate = ate;
  r.metrics.smoothness_gt = SmoothnessStats{12.5, 0.25};
  r.metrics.rmse_mm = 0.75;
  r.metrics.psnr_db = std::numeric_limits<double>::infinity();
  r.metrics.ssim = 1.0;
  return r;
}

TEST(TrialReport, JsonRoundTripIsLossless) {
  const TrialReport r = sample_report();
  const std::string text = dump_json(Json(r));
  const TrialReport back = parse_trial_report(text);
  EXPECT_EQ(dump_json(Json(back)), text);
  EXPECT_EQ(back.schema_version, TrialReport::kSchemaVersion);
  EXPECT_EQ(back.calibration.scope->camera.fx, 400.5);
  EXPECT_EQ(back.calibration.hand_eye->motion_pairs, 39u);
  EXPECT_EQ(back.alignment[1].failure->category, "no-overlap");
  EXPECT_EQ(*back.metrics.psnr_db, std::numeric_limits<double>::infinity());
  EXPECT_FALSE(back.metrics.rte);
  EXPECT_FALSE(back.metrics.hausdorff_mm);
  EXPECT_FALSE(back.calibration.external);
}

TEST(TrialReport, NotComputedFieldsAreExplicitNulls) {
  const Json j = TrialReport{};
  for (const char* key : {"ate", "rte", "smoothness_gt", "smoothness_pred", "rmse_mm", "hausdorff_mm", "psnr_db", "ssim"}) {
    ASSERT_TRUE(j.at("metrics").contains(key)) << key;
    EXPECT_TRUE(j.at("metrics").at(key).is_null()) << key;
  }
}

TEST(TrialReport, ParseErrors) {
  try {
    parse_trial_report("{not json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kParse);
  }
  try {
    parse_trial_report("{\"schema_version\": 1}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kFormat);
  }
}

TEST(TrialReport, CsvRowMatchesHeader) {
  const auto commas = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  const std::string row = csv_row(sample_report());
  EXPECT_EQ(commas(row), commas(csv_header()));
  EXPECT_EQ(row.rfind("t1,report,", 0), 0u);
  EXPECT_NE(row.find("inf"), std::string::npos);
}

TEST(Config, MergeOverridesNestedValues) {
  const Json defaults = default_config();
  const Json user = Json::parse(R"({"seed": 11, "align": {"inlier_threshold_mm": 2.5}})");
  const Json merged = merge_config(defaults, user);
  EXPECT_EQ(merged["seed"], 11);
  EXPECT_EQ(merged["align"]["inlier_threshold_mm"], 2.5);
  EXPECT_EQ(merged["align"]["ransac_iterations"], defaults["align"]["ransac_iterations"]);
  EXPECT_EQ(merge_config(defaults, Json::object()), defaults);
}

TEST(Config, RejectsUnknownKeysAndWrongTypes) {
  const Json defaults = default_config();
  for (const char* bad : {R"({"sead": 1})", R"({"align": {"threshold": 1}})", R"({"seed": "7"})",
                          R"({"align": 3})", R"({"seed": -1})", R"({"seed": 1.5})", R"({"eval_recon": {"skip_icp": 1}})"}) {
    try {
      merge_config(defaults, Json::parse(bad));
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.category(), ErrorCategory::kConfig) << bad;
    }
  }
}

TEST(Config, PresetsDifferOnlyInNoise) {
  const Json clean = default_config("noiseless");
  const Json noisy = default_config("noisy");
  EXPECT_EQ(clean["simulate"]["noise"]["pos_sigma"], 0.0);
  EXPECT_EQ(noisy["simulate"]["noise"]["pos_sigma"], 0.5);
  Json a = clean, b = noisy;
  a["simulate"].erase("noise");
  b["simulate"].erase("noise");
  a["simulate"].erase("preset");
  b["simulate"].erase("preset");
  EXPECT_EQ(a, b);
}

TEST(ViewSet, JsonRoundTrip) {
  ViewSet set;
  set.target = PlanarTarget(3, 4, 2.5);
  set.width = 640;
  set.height = 480;
  set.views.push_back({"v0", std::vector<Vec2>(12, Vec2(1.25, 2.5))});
  const ViewSet back = view_set_from_json(view_set_to_json(set));
  EXPECT_EQ(back.target.rows(), 3);
  EXPECT_EQ(back.target.spacing_mm(), 2.5);
  EXPECT_EQ(back.views[0].image_points, set.views[0].image_points);
  EXPECT_EQ(dump_json(view_set_to_json(back)), dump_json(view_set_to_json(set)));
}

}  // namespace
}  // namespace arthro
