#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "orchard/geometry.hpp"

namespace orchard {

// Pinhole intrinsics with a 2-term radial distortion model,
// x'' = x' * (1 + k1 r^2 + k2 r^4).
struct CameraIntrinsics {
  double fx = 0.0, fy = 0.0;  // focal lengths, px
  double cx = 0.0, cy = 0.0;  // principal point, px
  int width = 0, height = 0;
  double k1 = 0.0, k2 = 0.0;

  void validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("intrinsics: fx, fy must be > 0");
    if (!(cx > 0.0) || !(cx < width) || !(cy > 0.0) || !(cy < height)) {
      throw std::invalid_argument("intrinsics: principal point outside image");
    }
  }
};

struct PixelProjection {
  double u = 0.0, v = 0.0;  // continuous image coordinates
  int px = 0, py = 0;       // nearest pixel
  bool in_bounds = false;   // nearest pixel inside the grid
};

// Camera intrinsics plus the rigid chain linking camera, LiDAR, and IMU.
// camera_from_lidar maps LiDAR-frame coordinates into the camera frame;
// lidar_from_imu maps IMU(body)-frame coordinates into the LiDAR frame.
struct CalibrationSet {
  CameraIntrinsics intrinsics;
  PoseSE3 camera_from_lidar;
  PoseSE3 lidar_from_imu;

  PoseSE3 camera_from_imu() const { return camera_from_lidar * lidar_from_imu; }
  PoseSE3 imu_from_lidar() const { return lidar_from_imu.inverse(); }
};

constexpr double kMinCameraDepth = 1e-6;  // meters

// Point in camera frame (z forward) to distorted image coordinates.
// Returns nullopt when the point is at or behind the camera plane.
std::optional<PixelProjection> try_project(const CameraIntrinsics& intr, const Vec3& p_cam);

// Throwing variant: z <= 1e-6 m raises "behind camera".
PixelProjection project_point(const CameraIntrinsics& intr, const Vec3& p_cam);

// Inverts the radial distortion by Newton iteration on the radius. Valid on
// the monotone range of the distortion polynomial.
double undistort_radius(const CameraIntrinsics& intr, double r_distorted);

// Pixel (continuous coordinates) and depth back to a camera-frame point.
Vec3 unproject(const CameraIntrinsics& intr, double u, double v, double depth);

// Unit ray direction through image coordinates (u, v), camera frame.
Vec3 pixel_ray(const CameraIntrinsics& intr, double u, double v);

}  // namespace orchard
