#pragma once

#include <vector>

#include "orchard/camera.hpp"
#include "orchard/camera_frame.hpp"
#include "orchard/imu_types.hpp"
#include "orchard/rng.hpp"
#include "orchard/sim/scene.hpp"
#include "orchard/sim/trajectory.hpp"

namespace orchard::sim {

// Noise densities in continuous-time units (rad/s/sqrt(Hz), m/s^2/sqrt(Hz));
// biases are constant over a log.
struct ImuNoiseParams {
  double gyro_noise_density = 0.0;
  double accel_noise_density = 0.0;
  Vec3 gyro_bias{0, 0, 0};
  Vec3 accel_bias{0, 0, 0};
};

inline constexpr double kDefaultGravity = 9.81;  // m/s^2, along -z world

// IMU measurements by central finite differences of a dense pose sequence
// (body->world poses). Emits one sample per interior pose; requires >= 3
// poses. Gravity enters the specific force in the body frame, then bias and
// seeded Gaussian noise are applied.
std::vector<ImuSample> simulate_imu(const std::vector<TimedPose>& trajectory,
                                    double gravity_magnitude, const ImuNoiseParams& noise,
                                    SeededRng& rng);

// Ring/azimuth scan grid. Columns sweep azimuth [0, 2pi) uniformly over
// sweep_duration; per-point timestamps advance with the column.
struct LidarPattern {
  std::vector<double> ring_elevations;  // rad
  int azimuth_steps = 360;
  double max_range = 50.0;       // m
  double sweep_duration = 0.1;   // s

  void validate() const;
};

// Evenly spaced rings between the elevation limits (degrees).
LidarPattern make_lidar_pattern(int rings, double elev_min_deg, double elev_max_deg,
                                int azimuth_steps, double max_range, double sweep_duration);

// One scan captured from a fixed sensor pose (sensor->world). Points are in
// the sensor frame with intra-scan timestamps starting at 0; misses omitted;
// range noise applied along the ray.
PointCloud simulate_lidar_scan(const SceneSpec& scene, const PoseSE3& sensor_pose,
                               const LidarPattern& pattern, double range_sigma,
                               SeededRng& rng);

// One sweep where each azimuth column is cast from the instantaneous sensor
// pose sampler(t). Points are expressed in the capture-time sensor frame
// (raw, motion-skewed assembly) with absolute timestamps.
PointCloud simulate_lidar_sweep(const SceneSpec& scene,
                                const std::vector<TimedPose>& body_trajectory,
                                const PoseSE3& sensor_from_body, double t_start,
                                const LidarPattern& pattern, double range_sigma,
                                SeededRng& rng);

using orchard::CameraFrame;

// Per-pixel ray cast, nearest primitive color, flat shading. Background
// pixels take the reserved sentinel color.
CameraFrame render_camera_frame(const SceneSpec& scene, const PoseSE3& camera_pose,
                                const CameraIntrinsics& intrinsics);

}  // namespace orchard::sim
