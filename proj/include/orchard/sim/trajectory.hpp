#pragma once

#include <vector>

#include "orchard/geometry.hpp"

namespace orchard::sim {

// Keyframed device path. Interpolation is piecewise linear in translation
// and spherical-linear in rotation (order 1, the only supported order).
struct TrajectorySpec {
  std::vector<TimedPose> keyframes;
  int interpolation_order = 1;
  double imu_rate_hz = 200.0;
  double lidar_rate_hz = 10.0;
  double camera_rate_hz = 2.0;

  double start_time() const { return keyframes.front().t; }
  double end_time() const { return keyframes.back().t; }
  double duration() const { return end_time() - start_time(); }

  // Keyframe timestamps strictly increasing, rates positive, order == 1.
  void validate() const;
};

class TrajectorySampler {
 public:
  explicit TrajectorySampler(const TrajectorySpec& spec);

  PoseSE3 pose_at(double t) const { return interpolate_pose(spec_.keyframes, t); }
  const TrajectorySpec& spec() const { return spec_; }

 private:
  TrajectorySpec spec_;
};

// Dense ground-truth pose sequence sampled at the fastest configured rate.
// Requires >= 2 keyframes.
std::vector<TimedPose> sample_trajectory(const TrajectorySpec& spec);

// Poses sampled at an arbitrary rate over the spec's span.
std::vector<TimedPose> sample_at_rate(const TrajectorySpec& spec, double rate_hz);

}  // namespace orchard::sim
