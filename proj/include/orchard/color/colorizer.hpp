#pragma once

#include <optional>
#include <vector>

#include "orchard/camera.hpp"
#include "orchard/camera_frame.hpp"
#include "orchard/lio/map_store.hpp"

namespace orchard::color {

// Z-buffer visibility at pixel resolution. A point is visible iff it
// projects in front of the camera inside the image and its depth is within
// depth_tolerance of the minimum depth found in the (2*splat_radius+1)^2
// pixel window around its projection.
struct VisibilityParams {
  int splat_radius_px = 1;
  double depth_tolerance = 0.02;  // m
};

std::vector<bool> visibility_mask(const std::vector<Vec3>& world_points,
                                  const PoseSE3& camera_from_world,
                                  const CameraIntrinsics& intrinsics,
                                  const VisibilityParams& params = {});

inline std::vector<bool> visibility_mask(const lio::MapStore& map,
                                         const PoseSE3& camera_from_world,
                                         const CameraIntrinsics& intrinsics,
                                         const VisibilityParams& params = {}) {
  return visibility_mask(map.points(), camera_from_world, intrinsics, params);
}

struct ColorizeConfig {
  VisibilityParams visibility;
  // Grazing-view filter: a sample is taken only when |view dir . normal|
  // exceeds this. Nearest-pixel sampling near a silhouette reads the surface
  // behind, so grazing observations are dropped before they enter the mean.
  // 0 disables the filter (and skips normal estimation).
  double min_view_cos = 0.25;
  int normal_neighbors = 8;
  // Samples matching this color are ignored (the renderer's reserved
  // background). nullopt accepts every sample.
  std::optional<Color> ignore_color = sim_background_color();

  static std::optional<Color> sim_background_color() { return Color{255, 0, 255}; }
};

struct ColorizeReport {
  int frames_used = 0;
  int frames_skipped = 0;  // outside the trajectory span
  std::size_t samples_accumulated = 0;
  std::size_t samples_ignored = 0;  // matched ignore_color
};

// Projects map points into every posed frame and accumulates a running mean
// RGB per point. Camera pose at each frame time comes from interpolating the
// body trajectory and composing the calibration chain. Points never observed
// stay uncolored (count 0).
ColoredPointCloud colorize_map(const lio::MapStore& map,
                               const std::vector<CameraFrame>& frames,
                               const std::vector<TimedPose>& trajectory,
                               const CalibrationSet& calib, const ColorizeConfig& config,
                               ColorizeReport* report = nullptr);

// Per-point unit normals from local plane fits (sign unspecified).
std::vector<Vec3> estimate_normals(const lio::MapStore& map, int k);

}  // namespace orchard::color
