#include <algorithm>
#include <numeric>
#include <string>

#include "arthro/error.h"
#include "arthro/fusion.h"

namespace arthro {

Trajectory predict_scope_track(const GlobalTrack& g) {
  std::vector<TimedPose> out;
  out.reserve(g.trajectory.size());
  for (const auto& s : g.trajectory.samples()) {
    out.push_back({s.timestamp, compose(s.pose, g.hand_eye)});
  }
  return Trajectory(std::move(out), g.trajectory.frame_id(), g.trajectory.unit());
}

AlignmentResult align_window(const LocalMap& local, const GlobalTrack& g, const AlignConfig& cfg) {
  const Trajectory scope = predict_scope_track(g);
  const auto assoc = associate_by_time(local.trajectory, scope, cfg.max_dt);
  std::vector<PointPair> pairs;
  pairs.reserve(assoc.size());
  for (const auto& a : assoc) pairs.push_back({a.a.translation, a.b.translation});
  AlignmentResult result = robust_align(pairs, cfg.robust);
  result.window_id = local.window_id;
  return result;
}

namespace {

struct PlacedWindow {
  std::size_t input_index;
  Trajectory trajectory;  // global frame
  double ramp_in_end;     // end of overlap with the previous window, or start
  double ramp_out_start;  // start of overlap with the next window, or end
};

double weight_at(const PlacedWindow& w, double t) {
  const double start = w.trajectory.start_time();
  const double end = w.trajectory.end_time();
  double weight = 1.0;
  if (w.ramp_in_end > start && t < w.ramp_in_end) {
    weight *= (t - start) / (w.ramp_in_end - start);
  }
  if (w.ramp_out_start < end && t > w.ramp_out_start) {
    weight *= (end - t) / (end - w.ramp_out_start);
  }
  return std::clamp(weight, 0.0, 1.0);
}

}  // namespace

GlobalModel fuse_local_maps(std::span<const LocalMap> windows, const GlobalTrack& g,
                            const AlignConfig& cfg) {
  GlobalModel model;
  model.per_window.reserve(windows.size());
  std::vector<std::size_t> succeeded;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    try {
      model.per_window.push_back(align_window(windows[i], g, cfg));
      succeeded.push_back(i);
    } catch (const Error& e) {
      AlignmentResult failed;
      failed.window_id = windows[i].window_id;
      failed.failure = AlignmentFailure{std::string(category_name(e.category())), e.what()};
      model.per_window.push_back(std::move(failed));
    }
  }
  if (succeeded.empty()) {
    throw Error(ErrorCategory::kFusion, "no window could be aligned",
                {{"windows", std::to_string(windows.size())}});
  }
  return assemble_global_model(windows, std::move(model.per_window), g.trajectory.frame_id());
}

GlobalModel assemble_global_model(std::span<const LocalMap> windows, std::vector<AlignmentResult> per_window,
                                  const std::string& frame_id) {
  if (per_window.size() != windows.size()) {
    throw Error(ErrorCategory::kInput, "one alignment result per window is required");
  }
  GlobalModel model;
  model.per_window = std::move(per_window);
  std::vector<std::size_t> succeeded;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (!model.per_window[i].failure) succeeded.push_back(i);
  }
  if (succeeded.empty()) {
    throw Error(ErrorCategory::kFusion, "no window could be aligned",
                {{"windows", std::to_string(windows.size())}});
  }

  // Merge order is by window start time, independent of input order.
  std::stable_sort(succeeded.begin(), succeeded.end(), [&](std::size_t a, std::size_t b) {
    return windows[a].trajectory.start_time() < windows[b].trajectory.start_time();
  });

  std::vector<PlacedWindow> placed;
  placed.reserve(succeeded.size());
  for (const std::size_t i : succeeded) {
    const SimilarityTransform& s = model.per_window[i].transform;
    std::vector<TimedPose> samples;
    samples.reserve(windows[i].trajectory.size());
    for (const auto& p : windows[i].trajectory.samples()) {
      samples.push_back({p.timestamp, transform_pose(s, p.pose)});
    }
    Trajectory traj(std::move(samples), frame_id, LengthUnit::kMillimetre);
    placed.push_back({i, traj, traj.start_time(), traj.end_time()});
    for (const Vec3& p : windows[i].points.points) {
      model.fused_points.points.push_back(apply_sim3(s, p));
    }
  }
  for (std::size_t k = 1; k < placed.size(); ++k) {
    PlacedWindow& prev = placed[k - 1];
    PlacedWindow& cur = placed[k];
    if (prev.trajectory.end_time() > cur.trajectory.start_time()) {
      cur.ramp_in_end = std::min(prev.trajectory.end_time(), cur.trajectory.end_time());
      prev.ramp_out_start = cur.trajectory.start_time();
    }
  }
  model.fused_points.frame_id = frame_id;

  std::vector<double> times;
  for (const auto& w : placed) {
    for (const auto& s : w.trajectory.samples()) times.push_back(s.timestamp);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  std::vector<TimedPose> fused;
  fused.reserve(times.size());
  for (const double t : times) {
    double total = 0.0;
    Vec3 position = Vec3::Zero();
    Rotation rotation;
    bool any = false;
    std::vector<std::pair<const PlacedWindow*, double>> covering;
    for (const auto& w : placed) {
      if (t < w.trajectory.start_time() || t > w.trajectory.end_time()) continue;
      covering.emplace_back(&w, weight_at(w, t));
    }
    double weight_sum = 0.0;
    for (const auto& c : covering) weight_sum += c.second;
    for (const auto& [w, raw_weight] : covering) {
      // Degenerate ramps (all zero) fall back to equal weighting.
      const double weight = weight_sum > 0.0 ? raw_weight : 1.0;
      if (weight <= 0.0) continue;
      const RigidTransform pose = interpolate_pose(w->trajectory, t);
      total += weight;
      position += weight * pose.translation;
      rotation = any ? slerp(rotation, pose.rotation, weight / total) : pose.rotation;
      any = true;
    }
    fused.push_back({t, {rotation, position / total}});
  }
  model.fused_trajectory = Trajectory(std::move(fused), frame_id, LengthUnit::kMillimetre);
  return model;
}

}  // namespace arthro
