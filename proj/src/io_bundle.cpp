#include "orchard/io/bundle.hpp"

#include <cmath>
#include <stdexcept>

#include "orchard/io/image_io.hpp"
#include "orchard/io/json_io.hpp"
#include "orchard/io/ply.hpp"

namespace orchard::io {

namespace fs = std::filesystem;

CameraFrame LogBundle::load_frame(std::size_t index) const {
  CameraFrame frame = read_ppm(root / frames.at(index).path);
  frame.t = frames[index].t;
  return frame;
}

std::vector<CameraFrame> LogBundle::load_all_frames() const {
  std::vector<CameraFrame> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) out.push_back(load_frame(i));
  return out;
}

LogBundle load_bundle(const fs::path& manifest_path) {
  const json manifest = load_json(manifest_path);
  LogBundle bundle;
  bundle.root = manifest_path.parent_path();

  if (!manifest.contains("calibration")) {
    throw std::runtime_error("bundle: manifest missing calibration");
  }
  bundle.calibration = calibration_from_json(manifest["calibration"]);

  const auto resolve = [&](const std::string& rel) {
    const fs::path p = bundle.root / rel;
    if (!fs::exists(p)) throw std::runtime_error("bundle: referenced file missing: " + p.string());
    return p;
  };

  bundle.imu = read_imu_csv(resolve(manifest.at("imu").get<std::string>()));
  if (bundle.imu.empty()) throw std::runtime_error("bundle: IMU log is empty");

  for (const auto& s : manifest.at("scans")) {
    lio::ScanRecord rec;
    rec.t_start = s.at("t_start").get<double>();
    rec.t_end = s.at("t_end").get<double>();
    const PlyData ply = read_ply(resolve(s.at("path").get<std::string>()));
    rec.cloud = ply.cloud;
    rec.cloud.validate();
    if (!bundle.scans.empty() && !(rec.t_end > bundle.scans.back().t_end)) {
      throw std::runtime_error("bundle: scan timestamps not strictly increasing");
    }
    bundle.scans.push_back(std::move(rec));
  }

  if (manifest.contains("frame_index")) {
    bundle.frames = read_frame_index_csv(resolve(manifest["frame_index"].get<std::string>()));
    for (const auto& f : bundle.frames) resolve(f.path);
  }

  const json rates = manifest.value("rates", json::object());
  bundle.imu_rate_hz = rates.value("imu_hz", 0.0);
  bundle.lidar_rate_hz = rates.value("lidar_hz", 0.0);
  bundle.camera_rate_hz = rates.value("camera_hz", 0.0);
  bundle.seed = manifest.value("seed", 0ULL);

  const auto optional_path = [&](const char* key) -> std::optional<fs::path> {
    if (!manifest.contains(key)) return std::nullopt;
    return resolve(manifest[key].get<std::string>());
  };
  bundle.ground_truth_trajectory = optional_path("ground_truth_trajectory");
  bundle.scene_json = optional_path("scene");
  bundle.detections_json = optional_path("detections");
  bundle.labels_json = optional_path("labels");
  return bundle;
}

std::vector<fruits::Detection2D> ground_truth_detections(
    const sim::SceneSpec& scene, const std::vector<TimedPose>& body_trajectory,
    const std::vector<double>& frame_times, const CalibrationSet& calib,
    double min_radius_px) {
  std::vector<fruits::Detection2D> out;
  const PoseSE3 camera_from_body = calib.camera_from_imu();
  const CameraIntrinsics& intr = calib.intrinsics;

  for (std::size_t frame_id = 0; frame_id < frame_times.size(); ++frame_id) {
    const PoseSE3 body = interpolate_pose(body_trajectory, frame_times[frame_id]);
    const PoseSE3 camera_from_world = camera_from_body * body.inverse();
    const Vec3 cam_center = camera_from_world.inverse().translation;

    for (const auto& fruit : scene.fruits) {
      const Vec3 p_cam = camera_from_world * fruit.center;
      const auto proj = try_project(intr, p_cam);
      if (!proj || !proj->in_bounds) continue;

      // Occlusion: the first surface along the center ray must be this fruit.
      const Vec3 dir = (fruit.center - cam_center).normalized();
      const auto hit = cast_ray(scene, cam_center, dir);
      if (!hit || hit->kind != sim::PrimitiveKind::Fruit ||
          scene.fruits[hit->index].id != fruit.id) {
        continue;
      }

      const double radius_px = 0.5 * (intr.fx + intr.fy) * fruit.radius / p_cam.z();
      if (radius_px < min_radius_px) continue;

      fruits::Detection2D det;
      det.frame_id = static_cast<int>(frame_id);
      det.u_min = std::max(0.0, proj->u - radius_px);
      det.v_min = std::max(0.0, proj->v - radius_px);
      det.u_max = std::min<double>(intr.width, proj->u + radius_px);
      det.v_max = std::min<double>(intr.height, proj->v + radius_px);
      det.label = "fruit";
      det.confidence = 1.0;
      if (det.u_max - det.u_min < 1.0 || det.v_max - det.v_min < 1.0) continue;
      out.push_back(det);
    }
  }
  return out;
}

fs::path write_sim_bundle(const BundleSimConfig& config, const fs::path& dir) {
  config.scene.validate();
  config.trajectory.validate();
  config.lidar_pattern.validate();
  config.calibration.intrinsics.validate();

  fs::create_directories(dir);
  fs::create_directories(dir / "scans");
  fs::create_directories(dir / "frames");

  SeededRng rng(config.seed);

  // Dense ground-truth poses at the IMU rate drive everything.
  const auto gt_poses = sim::sample_at_rate(config.trajectory, config.trajectory.imu_rate_hz);
  const auto imu = sim::simulate_imu(gt_poses, config.gravity, config.imu_noise, rng);
  write_imu_csv(imu, dir / "imu.csv");
  write_trajectory_csv(gt_poses, dir / "ground_truth.csv");
  save_json(scene_to_json(config.scene), dir / "scene.json");
  save_json(calibration_to_json(config.calibration), dir / "calibration.json");

  const PoseSE3 lidar_from_body = config.calibration.lidar_from_imu;

  json scans = json::array();
  const double sweep = config.lidar_pattern.sweep_duration;
  const double t0 = config.trajectory.start_time();
  const double t_end = config.trajectory.end_time();
  int scan_id = 0;
  for (double ts = t0; ts + sweep <= t_end + 1e-9; ts += 1.0 / config.trajectory.lidar_rate_hz) {
    const PointCloud scan = sim::simulate_lidar_sweep(config.scene, gt_poses, lidar_from_body,
                                                      ts, config.lidar_pattern,
                                                      config.lidar_range_sigma, rng);
    char name[64];
    std::snprintf(name, sizeof(name), "scans/scan_%05d.ply", scan_id);
    write_ply(scan, dir / name);
    scans.push_back(json{{"path", name},
                         {"t_start", ts},
                         {"t_end", ts + sweep * (config.lidar_pattern.azimuth_steps - 1) /
                                            config.lidar_pattern.azimuth_steps}});
    ++scan_id;
  }

  std::vector<FrameIndexEntry> frame_index;
  std::vector<double> frame_times;
  const PoseSE3 body_from_camera = config.calibration.camera_from_imu().inverse();
  int frame_id = 0;
  for (double tf = t0; tf <= t_end + 1e-9; tf += 1.0 / config.trajectory.camera_rate_hz) {
    const PoseSE3 camera_pose = interpolate_pose(gt_poses, tf) * body_from_camera;
    CameraFrame frame =
        sim::render_camera_frame(config.scene, camera_pose, config.calibration.intrinsics);
    frame.t = tf;
    char name[64];
    std::snprintf(name, sizeof(name), "frames/frame_%05d.ppm", frame_id);
    write_ppm(frame, dir / name);
    frame_index.push_back(FrameIndexEntry{tf, name});
    frame_times.push_back(tf);
    ++frame_id;
  }
  write_frame_index_csv(frame_index, dir / "frames.csv");

  json manifest{{"version", 1},
                {"imu", "imu.csv"},
                {"scans", scans},
                {"frame_index", "frames.csv"},
                {"calibration", calibration_to_json(config.calibration)},
                {"rates",
                 {{"imu_hz", config.trajectory.imu_rate_hz},
                  {"lidar_hz", config.trajectory.lidar_rate_hz},
                  {"camera_hz", config.trajectory.camera_rate_hz}}},
                {"seed", config.seed},
                {"ground_truth_trajectory", "ground_truth.csv"},
                {"scene", "scene.json"}};

  if (config.write_detections) {
    const auto detections = ground_truth_detections(config.scene, gt_poses, frame_times,
                                                    config.calibration,
                                                    config.min_detection_radius_px);
    save_json(detections_to_json(detections), dir / "detections.json");
    manifest["detections"] = "detections.json";
  }

  const fs::path manifest_path = dir / "manifest.json";
  save_json(manifest, manifest_path);
  return manifest_path;
}

}  // namespace orchard::io
