#include "orchard/sim/sensors.hpp"

#include <cmath>
#include <stdexcept>

namespace orchard::sim {

std::vector<ImuSample> simulate_imu(const std::vector<TimedPose>& trajectory,
                                    double gravity_magnitude, const ImuNoiseParams& noise,
                                    SeededRng& rng) {
  if (trajectory.size() < 3) throw std::invalid_argument("simulate_imu: need >= 3 poses");
  const Vec3 g_world(0.0, 0.0, -gravity_magnitude);

  std::vector<ImuSample> out;
  out.reserve(trajectory.size() - 2);
  for (std::size_t i = 1; i + 1 < trajectory.size(); ++i) {
    const TimedPose& prev = trajectory[i - 1];
    const TimedPose& cur = trajectory[i];
    const TimedPose& next = trajectory[i + 1];
    const double dt1 = cur.t - prev.t;
    const double dt2 = next.t - cur.t;
    if (!(dt1 > 0.0) || !(dt2 > 0.0)) {
      throw std::invalid_argument("simulate_imu: non-increasing trajectory timestamps");
    }

    // Body rate: constant-rate assumption over [i-1, i+1].
    const Rotation rel = prev.pose.rotation.inverse() * next.pose.rotation;
    const Vec3 omega = rel.log() / (dt1 + dt2);

    // World acceleration: central second difference (non-uniform safe).
    const Vec3 v1 = (cur.pose.translation - prev.pose.translation) / dt1;
    const Vec3 v2 = (next.pose.translation - cur.pose.translation) / dt2;
    const Vec3 accel_world = 2.0 * (v2 - v1) / (dt1 + dt2);

    const Vec3 specific_force = cur.pose.rotation.inverse() * (accel_world - g_world);

    ImuSample s;
    s.t = cur.t;
    const double rate = 2.0 / (dt1 + dt2);
    const double gyro_sigma = noise.gyro_noise_density * std::sqrt(rate);
    const double accel_sigma = noise.accel_noise_density * std::sqrt(rate);
    for (int k = 0; k < 3; ++k) {
      s.gyro[k] = omega[k] + noise.gyro_bias[k] + rng.normal(0.0, gyro_sigma);
      s.accel[k] = specific_force[k] + noise.accel_bias[k] + rng.normal(0.0, accel_sigma);
    }
    out.push_back(s);
  }
  return out;
}

void LidarPattern::validate() const {
  if (ring_elevations.empty() || azimuth_steps < 1) {
    throw std::invalid_argument("lidar pattern: empty ray grid");
  }
  if (!(max_range > 0.0) || !(sweep_duration > 0.0)) {
    throw std::invalid_argument("lidar pattern: max_range and sweep_duration must be > 0");
  }
}

LidarPattern make_lidar_pattern(int rings, double elev_min_deg, double elev_max_deg,
                                int azimuth_steps, double max_range, double sweep_duration) {
  LidarPattern p;
  p.azimuth_steps = azimuth_steps;
  p.max_range = max_range;
  p.sweep_duration = sweep_duration;
  p.ring_elevations.reserve(rings);
  for (int i = 0; i < rings; ++i) {
    const double frac = rings == 1 ? 0.5 : static_cast<double>(i) / (rings - 1);
    const double deg = elev_min_deg + frac * (elev_max_deg - elev_min_deg);
    p.ring_elevations.push_back(deg * M_PI / 180.0);
  }
  p.validate();
  return p;
}

namespace {

Vec3 ray_direction(double azimuth, double elevation) {
  const double ce = std::cos(elevation);
  return Vec3(ce * std::cos(azimuth), ce * std::sin(azimuth), std::sin(elevation));
}

}  // namespace

PointCloud simulate_lidar_scan(const SceneSpec& scene, const PoseSE3& sensor_pose,
                               const LidarPattern& pattern, double range_sigma,
                               SeededRng& rng) {
  pattern.validate();
  PointCloud cloud;
  cloud.frame = "lidar";
  for (int j = 0; j < pattern.azimuth_steps; ++j) {
    const double az = 2.0 * M_PI * j / pattern.azimuth_steps;
    const double tau = pattern.sweep_duration * j / pattern.azimuth_steps;
    for (double elev : pattern.ring_elevations) {
      const Vec3 dir_sensor = ray_direction(az, elev);
      const Vec3 dir_world = sensor_pose.rotation * dir_sensor;
      const auto hit = cast_ray(scene, sensor_pose.translation, dir_world, pattern.max_range);
      if (!hit) continue;
      const double range = hit->range + (range_sigma > 0.0 ? rng.normal(0.0, range_sigma) : 0.0);
      cloud.points.push_back(range * dir_sensor);
      cloud.times.push_back(tau);
    }
  }
  return cloud;
}

PointCloud simulate_lidar_sweep(const SceneSpec& scene,
                                const std::vector<TimedPose>& body_trajectory,
                                const PoseSE3& sensor_from_body, double t_start,
                                const LidarPattern& pattern, double range_sigma,
                                SeededRng& rng) {
  pattern.validate();
  const PoseSE3 body_from_sensor = sensor_from_body.inverse();
  PointCloud cloud;
  cloud.frame = "lidar";
  for (int j = 0; j < pattern.azimuth_steps; ++j) {
    const double az = 2.0 * M_PI * j / pattern.azimuth_steps;
    const double t = t_start + pattern.sweep_duration * j / pattern.azimuth_steps;
    const PoseSE3 sensor_pose = interpolate_pose(body_trajectory, t) * body_from_sensor;
    for (double elev : pattern.ring_elevations) {
      const Vec3 dir_sensor = ray_direction(az, elev);
      const Vec3 dir_world = sensor_pose.rotation * dir_sensor;
      const auto hit = cast_ray(scene, sensor_pose.translation, dir_world, pattern.max_range);
      if (!hit) continue;
      const double range = hit->range + (range_sigma > 0.0 ? rng.normal(0.0, range_sigma) : 0.0);
      cloud.points.push_back(range * dir_sensor);
      cloud.times.push_back(t);
    }
  }
  return cloud;
}

CameraFrame render_camera_frame(const SceneSpec& scene, const PoseSE3& camera_pose,
                                const CameraIntrinsics& intrinsics) {
  intrinsics.validate();
  CameraFrame frame;
  frame.width = intrinsics.width;
  frame.height = intrinsics.height;
  frame.pixels.assign(static_cast<std::size_t>(frame.width) * frame.height, kBackgroundColor);
  for (int v = 0; v < frame.height; ++v) {
    for (int u = 0; u < frame.width; ++u) {
      const Vec3 dir_cam = pixel_ray(intrinsics, u, v);
      const Vec3 dir_world = camera_pose.rotation * dir_cam;
      const auto hit = cast_ray(scene, camera_pose.translation, dir_world);
      if (hit) frame.at(u, v) = hit->color;
    }
  }
  return frame;
}

}  // namespace orchard::sim
