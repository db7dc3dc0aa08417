#pragma once

#include <cstdint>

#include "orchard/sim/scene.hpp"
#include "orchard/sim/trajectory.hpp"

namespace orchard::sim {

// Procedural orchard stand: trunks in a row, branches radiating from the
// upper trunk, fruits floating near branch tips with clearance from other
// geometry so each fruit forms an isolated surface cluster.
struct OrchardParams {
  int tree_count = 2;
  double tree_spacing = 1.6;        // m, along x
  double trunk_height = 1.9;        // m
  double trunk_radius = 0.12;       // m
  int branches_per_tree = 6;
  double branch_length = 0.7;       // m
  double branch_radius = 0.025;     // m
  int fruit_count = 20;
  double fruit_radius_min = 0.035;  // m
  double fruit_radius_max = 0.05;   // m
  double fruit_clearance = 0.12;    // m, min gap between fruit surface and other geometry
  double fruit_spacing = 0.22;      // m, min distance between fruit centers
  std::uint64_t seed = 1;
};

SceneSpec make_orchard_scene(const OrchardParams& params);

// Center of the stand at a given height (orbit target).
Vec3 orchard_center(const OrchardParams& params, double height);

// Smooth closed orbit: dwell at the start, raised-cosine progress around a
// full circle, body x-axis facing the center, optional smooth pitch sway.
// Keyframes are sampled densely (at the IMU rate) so finite-difference IMU
// synthesis stays second-order accurate.
struct OrbitParams {
  Vec3 center{0, 0, 0};
  double radius = 1.8;       // m
  double height = 1.2;       // m
  double duration = 20.0;    // s
  double dwell = 1.0;        // s of stillness at the start
  double pitch_amplitude = 0.0;  // rad, sinusoidal sway cycles over the orbit
  int pitch_cycles = 3;
  double start_azimuth = 0.0;    // rad
  bool clockwise = false;
  double imu_rate_hz = 200.0;
  double lidar_rate_hz = 10.0;
  double camera_rate_hz = 2.0;
};

TrajectorySpec make_orbit_trajectory(const OrbitParams& params);

}  // namespace orchard::sim
