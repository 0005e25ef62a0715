#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arthro/geometry.h"

namespace arthro {

enum class LengthUnit { kMillimetre, kMetre };

std::string_view unit_name(LengthUnit unit);
LengthUnit parse_unit(std::string_view name);
/// Multiplier converting a length in `unit` to millimetres.
double to_millimetres(LengthUnit unit);

struct TimedPose {
  double timestamp = 0.0;
  RigidTransform pose;
};

/// Time-stamped camera poses (camera -> frame_id). Timestamps are strictly
/// increasing; construction and push_back enforce it.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<TimedPose> samples, std::string frame_id = "world",
                      LengthUnit unit = LengthUnit::kMillimetre);

  void push_back(const TimedPose& sample);

  std::span<const TimedPose> samples() const { return samples_; }
  const TimedPose& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double start_time() const { return samples_.front().timestamp; }
  double end_time() const { return samples_.back().timestamp; }

  const std::string& frame_id() const { return frame_id_; }
  void set_frame_id(std::string id) { frame_id_ = std::move(id); }
  LengthUnit unit() const { return unit_; }

  /// Same trajectory with positions expressed in `unit`.
  Trajectory converted_to(LengthUnit unit) const;

 private:
  std::vector<TimedPose> samples_;
  std::string frame_id_ = "world";
  LengthUnit unit_ = LengthUnit::kMillimetre;
};

/// Pose at time t: translation interpolated linearly, rotation by slerp,
/// between the bracketing samples. Exact at sample timestamps.
/// Throws Error(kRange) when t lies outside [start_time, end_time].
RigidTransform interpolate_pose(const Trajectory& traj, double t);

struct AssociatedPose {
  RigidTransform a;
  RigidTransform b;
  double timestamp = 0.0;
};

/// Pairs every sample of `a` with `b` interpolated at the same timestamp,
/// provided the timestamp lies within b's span and the bracketing gap in b is
/// at most max_dt. Throws Error(kNoOverlap) when nothing pairs.
std::vector<AssociatedPose> associate_by_time(const Trajectory& a, const Trajectory& b, double max_dt);

}  // namespace arthro
