#include "orchard/sim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace orchard::sim {

void TrajectorySpec::validate() const {
  if (keyframes.size() < 2) throw std::invalid_argument("trajectory: need >= 2 keyframes");
  for (std::size_t i = 1; i < keyframes.size(); ++i) {
    if (!(keyframes[i].t > keyframes[i - 1].t)) {
      throw std::invalid_argument("trajectory: keyframe timestamps must be strictly increasing");
    }
  }
  if (!(imu_rate_hz > 0.0) || !(lidar_rate_hz > 0.0) || !(camera_rate_hz > 0.0)) {
    throw std::invalid_argument("trajectory: sample rates must be positive");
  }
  if (interpolation_order != 1) {
    throw std::invalid_argument("trajectory: only interpolation order 1 is supported");
  }
}

TrajectorySampler::TrajectorySampler(const TrajectorySpec& spec) : spec_(spec) {
  spec_.validate();
}

std::vector<TimedPose> sample_at_rate(const TrajectorySpec& spec, double rate_hz) {
  spec.validate();
  if (!(rate_hz > 0.0)) throw std::invalid_argument("sample_at_rate: rate must be positive");
  const double dt = 1.0 / rate_hz;
  const double t0 = spec.start_time();
  const double t1 = spec.end_time();
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9)) + 1;
  std::vector<TimedPose> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    out.push_back(TimedPose{t, interpolate_pose(spec.keyframes, t)});
  }
  return out;
}

std::vector<TimedPose> sample_trajectory(const TrajectorySpec& spec) {
  const double rate = std::max({spec.imu_rate_hz, spec.lidar_rate_hz, spec.camera_rate_hz});
  return sample_at_rate(spec, rate);
}

}  // namespace orchard::sim
