#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arthro/calibration.h"
#include "arthro/fusion.h"
#include "arthro/metrics.h"
#include "json.hpp"

namespace arthro {

using Json = nlohmann::ordered_json;

struct HandEyeSummary {
  RigidTransform hand_eye;     // solver output
  RigidTransform compensated;  // after the shaft-offset correction
  std::size_t motion_pairs = 0;
  double shaft_offset_mm = 0.0;
  double rpe_before_px = 0.0;
  double rpe_after_px = 0.0;
  double rpe_after_mm = 0.0;
};

struct CalibrationSummary {
  std::optional<CalibrationResult> external;
  std::optional<CalibrationResult> scope;
  std::optional<HandEyeSummary> hand_eye;
};

/// One trial: everything a pipeline stage (or the merged `report`) computed,
/// plus the configuration that produced it.
struct TrialReport {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  std::string toolkit_version;
  std::string trial;
  std::string command;
  std::optional<std::string> generated_at;
  Json config = Json::object();
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  std::vector<std::string> warnings;
  CalibrationSummary calibration;
  std::vector<AlignmentResult> alignment;
  MetricReport metrics;
};

void to_json(Json& j, const Rotation& r);
void from_json(const Json& j, Rotation& r);
void to_json(Json& j, const RigidTransform& t);
void from_json(const Json& j, RigidTransform& t);
void to_json(Json& j, const SimilarityTransform& s);
void from_json(const Json& j, SimilarityTransform& s);
void to_json(Json& j, const PinholeCamera& c);
void from_json(const Json& j, PinholeCamera& c);
void to_json(Json& j, const CalibrationResult& r);
void from_json(const Json& j, CalibrationResult& r);
void to_json(Json& j, const HandEyeSummary& h);
void from_json(const Json& j, HandEyeSummary& h);
void to_json(Json& j, const AlignmentResult& a);
void from_json(const Json& j, AlignmentResult& a);
void to_json(Json& j, const TrajError& e);
void from_json(const Json& j, TrajError& e);
void to_json(Json& j, const SmoothnessStats& s);
void from_json(const Json& j, SmoothnessStats& s);
void to_json(Json& j, const MetricReport& m);
void from_json(const Json& j, MetricReport& m);
void to_json(Json& j, const TrialReport& r);
void from_json(const Json& j, TrialReport& r);

/// Throws Error(kParse) for invalid JSON text or Error(kFormat) for a
/// document that does not match the schema.
TrialReport parse_trial_report(std::string_view text);
std::string dump_json(const Json& j);

/// Flat row mirroring the columns of the tracking and reconstruction tables;
/// metrics that were not computed are left empty.
std::string csv_header();
std::string csv_row(const TrialReport& r);

}  // namespace arthro
