#include "arthro/trajectory.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "arthro/error.h"

namespace arthro {

std::string_view unit_name(LengthUnit unit) {
  return unit == LengthUnit::kMetre ? "m" : "mm";
}

LengthUnit parse_unit(std::string_view name) {
  if (name == "mm") return LengthUnit::kMillimetre;
  if (name == "m") return LengthUnit::kMetre;
  throw Error(ErrorCategory::kInput, "unknown length unit '" + std::string(name) + "' (expected mm or m)");
}

double to_millimetres(LengthUnit unit) { return unit == LengthUnit::kMetre ? 1000.0 : 1.0; }

Trajectory::Trajectory(std::vector<TimedPose> samples, std::string frame_id, LengthUnit unit)
    : frame_id_(std::move(frame_id)), unit_(unit) {
  samples_.reserve(samples.size());
  for (const auto& s : samples) push_back(s);
}

void Trajectory::push_back(const TimedPose& sample) {
  if (!std::isfinite(sample.timestamp)) {
    throw Error(ErrorCategory::kInput, "non-finite timestamp");
  }
  if (!samples_.empty() && !(sample.timestamp > samples_.back().timestamp)) {
    throw Error(ErrorCategory::kOrder, "timestamps must be strictly increasing",
                {{"index", std::to_string(samples_.size())}});
  }
  samples_.push_back(sample);
}

Trajectory Trajectory::converted_to(LengthUnit unit) const {
  if (unit == unit_) return *this;
  const double factor = to_millimetres(unit_) / to_millimetres(unit);
  std::vector<TimedPose> out(samples_.begin(), samples_.end());
  for (auto& s : out) s.pose.translation *= factor;
  return Trajectory(std::move(out), frame_id_, unit);
}

RigidTransform interpolate_pose(const Trajectory& traj, double t) {
  if (traj.empty() || t < traj.start_time() || t > traj.end_time()) {
    throw Error(ErrorCategory::kRange, "interpolation time outside trajectory span",
                {{"t", std::to_string(t)}});
  }
  const auto samples = traj.samples();
  const auto it = std::lower_bound(samples.begin(), samples.end(), t,
                                   [](const TimedPose& s, double v) { return s.timestamp < v; });
  if (it->timestamp == t) return it->pose;
  const TimedPose& hi = *it;
  const TimedPose& lo = *(it - 1);
  const double f = (t - lo.timestamp) / (hi.timestamp - lo.timestamp);
  return {slerp(lo.pose.rotation, hi.pose.rotation, f),
          lo.pose.translation + f * (hi.pose.translation - lo.pose.translation)};
}

std::vector<AssociatedPose> associate_by_time(const Trajectory& a, const Trajectory& b, double max_dt) {
  if (!(max_dt > 0.0)) {
    throw Error(ErrorCategory::kInput, "max_dt must be positive");
  }
  std::vector<AssociatedPose> out;
  if (b.empty()) {
    throw Error(ErrorCategory::kNoOverlap, "trajectories share no time overlap");
  }
  const auto bs = b.samples();
  for (const auto& s : a.samples()) {
    const double t = s.timestamp;
    if (t < b.start_time() || t > b.end_time()) continue;
    const auto it = std::lower_bound(bs.begin(), bs.end(), t,
                                     [](const TimedPose& p, double v) { return p.timestamp < v; });
    if (it->timestamp != t && it->timestamp - (it - 1)->timestamp > max_dt) continue;
    out.push_back({s.pose, interpolate_pose(b, t), t});
  }
  if (out.empty()) {
    throw Error(ErrorCategory::kNoOverlap, "trajectories share no time overlap",
                {{"a_frame", a.frame_id()}, {"b_frame", b.frame_id()}});
  }
  return out;
}

}  // namespace arthro
