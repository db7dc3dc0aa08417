#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "orchard/camera_frame.hpp"
#include "orchard/fruits/localizer.hpp"
#include "orchard/io/csv.hpp"
#include "orchard/lio/odometry.hpp"
#include "orchard/sim/orchard_builder.hpp"
#include "orchard/sim/sensors.hpp"

namespace orchard::io {

// A recorded session on disk: manifest.json names every stream. Scan PLYs
// carry absolute per-point times; frames are PPM images listed in a
// timestamp index CSV.
struct LogBundle {
  std::filesystem::path root;

  std::vector<ImuSample> imu;
  std::vector<lio::ScanRecord> scans;
  std::vector<FrameIndexEntry> frames;  // paths relative to root
  CalibrationSet calibration;
  double imu_rate_hz = 0.0;
  double lidar_rate_hz = 0.0;
  double camera_rate_hz = 0.0;
  std::uint64_t seed = 0;

  std::optional<std::filesystem::path> ground_truth_trajectory;
  std::optional<std::filesystem::path> scene_json;
  std::optional<std::filesystem::path> detections_json;
  std::optional<std::filesystem::path> labels_json;

  CameraFrame load_frame(std::size_t index) const;
  std::vector<CameraFrame> load_all_frames() const;
};

// Reads manifest.json and every referenced stream; throws if a referenced
// file is missing, timestamps are not strictly increasing per stream, or
// calibration is absent.
LogBundle load_bundle(const std::filesystem::path& manifest_path);

// Simulation-side generation: renders a complete bundle (IMU CSV, scan PLYs,
// frame PPMs + index, calibration, ground-truth trajectory and scene, and
// optional ground-truth detections) under `dir`.
struct BundleSimConfig {
  sim::SceneSpec scene;
  sim::TrajectorySpec trajectory;
  sim::LidarPattern lidar_pattern;
  CalibrationSet calibration;
  sim::ImuNoiseParams imu_noise;
  double lidar_range_sigma = 0.0;  // m
  double gravity = sim::kDefaultGravity;
  std::uint64_t seed = 1;
  bool write_detections = true;
  double min_detection_radius_px = 3.0;  // smaller projected fruits are skipped
};

std::filesystem::path write_sim_bundle(const BundleSimConfig& config,
                                       const std::filesystem::path& dir);

// Ground-truth 2D boxes: a fruit is reported in a frame when its center is
// visible (first ray hit) and its projected radius is large enough.
std::vector<fruits::Detection2D> ground_truth_detections(
    const sim::SceneSpec& scene, const std::vector<TimedPose>& body_trajectory,
    const std::vector<double>& frame_times, const CalibrationSet& calib,
    double min_radius_px);

}  // namespace orchard::io
