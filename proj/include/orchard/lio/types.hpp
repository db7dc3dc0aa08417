#pragma once

#include <Eigen/Core>

#include "orchard/geometry.hpp"

namespace orchard::lio {

// Full odometry state. Orientation maps body to world; gravity is the world
// gravity vector (nominally (0, 0, -9.81)).
struct NavState {
  Rotation orientation;
  Vec3 position{0, 0, 0};
  Vec3 velocity{0, 0, 0};
  Vec3 gyro_bias{0, 0, 0};
  Vec3 accel_bias{0, 0, 0};
  Vec3 gravity{0, 0, -9.81};

  PoseSE3 pose() const { return PoseSE3(orientation, position); }
};

// Error-state layout: (dtheta, dp, dv, dbg, dba, dg).
inline constexpr int kStateDim = 18;
inline constexpr int kIdxTheta = 0;
inline constexpr int kIdxPos = 3;
inline constexpr int kIdxVel = 6;
inline constexpr int kIdxBg = 9;
inline constexpr int kIdxBa = 12;
inline constexpr int kIdxGrav = 15;

using StateCovariance = Eigen::Matrix<double, kStateDim, kStateDim>;
using ErrorVector = Eigen::Matrix<double, kStateDim, 1>;

struct OdometryConfig {
  // IMU continuous-time noise densities
  double gyro_noise_density = 0.005;      // rad/s/sqrt(Hz)
  double accel_noise_density = 0.05;      // m/s^2/sqrt(Hz)
  double gyro_bias_rw_density = 1e-4;     // rad/s^2/sqrt(Hz)
  double accel_bias_rw_density = 1e-3;    // m/s^3/sqrt(Hz)

  // Initial error covariance diagonals
  double init_cov_orientation = 1e-2;  // rad^2
  double init_cov_position = 1e-2;     // m^2
  double init_cov_velocity = 1e-2;     // (m/s)^2
  double init_cov_gyro_bias = 1e-2;
  double init_cov_accel_bias = 1e-2;
  double init_cov_gravity = 1e-2;      // used only when estimate_gravity

  int max_iterations = 5;
  double convergence_threshold = 1e-4;
  int plane_neighbors = 5;              // k >= 3
  double plane_validity_threshold = 0.1;  // m
  double map_resolution = 0.05;         // m, voxel gating
  bool deskew = true;

  double measurement_sigma = 0.05;  // m, point-to-plane noise
  double max_residual = 0.5;        // m, matches beyond this are dropped
  double gravity_magnitude = 9.81;  // m/s^2
  bool estimate_gravity = false;
  double init_window = 0.5;         // s of accelerometer used for orientation init
  double max_time_gap = 0.5;        // s, larger IMU/scan gaps abort the run

  void validate() const;
};

}  // namespace orchard::lio
