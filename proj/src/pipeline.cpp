#include "orchard/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include "orchard/io/image_io.hpp"
#include "orchard/io/ply.hpp"

namespace orchard {

namespace fs = std::filesystem;
using io::json;

void PipelineConfig::validate() const {
  odometry.validate();
  if (eval_thresholds.empty()) throw std::invalid_argument("pipeline: no eval thresholds");
  for (double d : eval_thresholds) {
    if (!(d > 0.0)) throw std::invalid_argument("pipeline: thresholds must be positive");
  }
  if (!(fruits.cluster_eps > 0.0) || fruits.cluster_min_pts < 1 ||
      !(fruits.merge_radius > 0.0)) {
    throw std::invalid_argument("pipeline: fruit localizer parameters out of range");
  }
  if (colorize.visibility.splat_radius_px < 0 || !(colorize.visibility.depth_tolerance > 0.0)) {
    throw std::invalid_argument("pipeline: colorizer parameters out of range");
  }
}

json pipeline_config_to_json(const PipelineConfig& c) {
  json j;
  j["odometry"] = {{"gyro_noise_density", c.odometry.gyro_noise_density},
                   {"accel_noise_density", c.odometry.accel_noise_density},
                   {"gyro_bias_rw_density", c.odometry.gyro_bias_rw_density},
                   {"accel_bias_rw_density", c.odometry.accel_bias_rw_density},
                   {"init_cov_orientation", c.odometry.init_cov_orientation},
                   {"init_cov_position", c.odometry.init_cov_position},
                   {"init_cov_velocity", c.odometry.init_cov_velocity},
                   {"init_cov_gyro_bias", c.odometry.init_cov_gyro_bias},
                   {"init_cov_accel_bias", c.odometry.init_cov_accel_bias},
                   {"init_cov_gravity", c.odometry.init_cov_gravity},
                   {"max_iterations", c.odometry.max_iterations},
                   {"convergence_threshold", c.odometry.convergence_threshold},
                   {"plane_neighbors", c.odometry.plane_neighbors},
                   {"plane_validity_threshold", c.odometry.plane_validity_threshold},
                   {"map_resolution", c.odometry.map_resolution},
                   {"deskew", c.odometry.deskew},
                   {"measurement_sigma", c.odometry.measurement_sigma},
                   {"gravity_magnitude", c.odometry.gravity_magnitude},
                   {"estimate_gravity", c.odometry.estimate_gravity},
                   {"init_window", c.odometry.init_window},
                   {"max_time_gap", c.odometry.max_time_gap}};
  j["colorize"] = {{"splat_radius_px", c.colorize.visibility.splat_radius_px},
                   {"depth_tolerance", c.colorize.visibility.depth_tolerance},
                   {"min_view_cos", c.colorize.min_view_cos},
                   {"normal_neighbors", c.colorize.normal_neighbors}};
  j["fruits"] = {{"cluster_eps", c.fruits.cluster_eps},
                 {"cluster_min_pts", c.fruits.cluster_min_pts},
                 {"min_cluster_size", c.fruits.min_cluster_size},
                 {"merge_radius", c.fruits.merge_radius},
                 {"sphere_rms_accept", c.fruits.sphere_rms_accept},
                 {"fruit_radius_min", c.fruits.fruit_radius_min},
                 {"fruit_radius_max", c.fruits.fruit_radius_max}};
  j["eval_thresholds"] = c.eval_thresholds;
  if (c.reference_ply) j["reference_ply"] = c.reference_ply->string();
  if (c.map_landmarks_json) j["map_landmarks"] = c.map_landmarks_json->string();
  if (c.reference_landmarks_json) j["reference_landmarks"] = c.reference_landmarks_json->string();
  j["output_dir"] = c.output_dir.string();
  return j;
}

PipelineConfig pipeline_config_from_json(const json& j, PipelineConfig c) {
  if (j.contains("odometry")) {
    const json& o = j["odometry"];
    auto& d = c.odometry;
    d.gyro_noise_density = o.value("gyro_noise_density", d.gyro_noise_density);
    d.accel_noise_density = o.value("accel_noise_density", d.accel_noise_density);
    d.gyro_bias_rw_density = o.value("gyro_bias_rw_density", d.gyro_bias_rw_density);
    d.accel_bias_rw_density = o.value("accel_bias_rw_density", d.accel_bias_rw_density);
    d.init_cov_orientation = o.value("init_cov_orientation", d.init_cov_orientation);
    d.init_cov_position = o.value("init_cov_position", d.init_cov_position);
    d.init_cov_velocity = o.value("init_cov_velocity", d.init_cov_velocity);
    d.init_cov_gyro_bias = o.value("init_cov_gyro_bias", d.init_cov_gyro_bias);
    d.init_cov_accel_bias = o.value("init_cov_accel_bias", d.init_cov_accel_bias);
    d.init_cov_gravity = o.value("init_cov_gravity", d.init_cov_gravity);
    d.max_iterations = o.value("max_iterations", d.max_iterations);
    d.convergence_threshold = o.value("convergence_threshold", d.convergence_threshold);
    d.plane_neighbors = o.value("plane_neighbors", d.plane_neighbors);
    d.plane_validity_threshold = o.value("plane_validity_threshold", d.plane_validity_threshold);
    d.map_resolution = o.value("map_resolution", d.map_resolution);
    d.deskew = o.value("deskew", d.deskew);
    d.measurement_sigma = o.value("measurement_sigma", d.measurement_sigma);
    d.gravity_magnitude = o.value("gravity_magnitude", d.gravity_magnitude);
    d.estimate_gravity = o.value("estimate_gravity", d.estimate_gravity);
    d.init_window = o.value("init_window", d.init_window);
    d.max_time_gap = o.value("max_time_gap", d.max_time_gap);
  }
  if (j.contains("colorize")) {
    const json& o = j["colorize"];
    c.colorize.visibility.splat_radius_px =
        o.value("splat_radius_px", c.colorize.visibility.splat_radius_px);
    c.colorize.visibility.depth_tolerance =
        o.value("depth_tolerance", c.colorize.visibility.depth_tolerance);
    c.colorize.min_view_cos = o.value("min_view_cos", c.colorize.min_view_cos);
    c.colorize.normal_neighbors = o.value("normal_neighbors", c.colorize.normal_neighbors);
  }
  if (j.contains("fruits")) {
    const json& o = j["fruits"];
    auto& f = c.fruits;
    f.cluster_eps = o.value("cluster_eps", f.cluster_eps);
    f.cluster_min_pts = o.value("cluster_min_pts", f.cluster_min_pts);
    f.min_cluster_size = o.value("min_cluster_size", f.min_cluster_size);
    f.merge_radius = o.value("merge_radius", f.merge_radius);
    f.sphere_rms_accept = o.value("sphere_rms_accept", f.sphere_rms_accept);
    f.fruit_radius_min = o.value("fruit_radius_min", f.fruit_radius_min);
    f.fruit_radius_max = o.value("fruit_radius_max", f.fruit_radius_max);
  }
  if (j.contains("eval_thresholds")) {
    c.eval_thresholds = j["eval_thresholds"].get<std::vector<double>>();
  }
  if (j.contains("reference_ply")) c.reference_ply = j["reference_ply"].get<std::string>();
  if (j.contains("map_landmarks")) c.map_landmarks_json = j["map_landmarks"].get<std::string>();
  if (j.contains("reference_landmarks")) {
    c.reference_landmarks_json = j["reference_landmarks"].get<std::string>();
  }
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  return c;
}

namespace {

class StageTimer {
 public:
  StageTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

json stage_to_json(const StageResult& s) {
  const char* status = s.status == StageStatus::Done      ? "done"
                       : s.status == StageStatus::Resumed ? "resumed"
                                                          : "skipped";
  json j{{"name", s.name}, {"status", status}, {"seconds", io::round_sig9(s.seconds)},
         {"warnings", s.warnings}};
  if (!s.note.empty()) j["note"] = s.note;
  return j;
}

}  // namespace

PipelineSummary run_pipeline(const fs::path& manifest_path, const PipelineConfig& config,
                             const std::vector<std::string>& stages) {
  config.validate();
  const auto wanted = [&](const char* name) {
    if (stages.empty()) return true;
    return std::find(stages.begin(), stages.end(), name) != stages.end();
  };
  io::LogBundle bundle;
  try {
    bundle = io::load_bundle(manifest_path);
  } catch (const std::exception& e) {
    throw StageError("validate", e.what());
  }

  const fs::path out = config.output_dir;
  fs::create_directories(out);
  const fs::path trajectory_csv = out / "trajectory.csv";
  const fs::path map_ply = out / "map.ply";
  const fs::path colored_ply = out / "colored.ply";
  const fs::path fruits_json_path = out / "fruits.json";
  const fs::path registration_json = out / "registration.json";

  PipelineSummary summary;

  // --- odometry ---------------------------------------------------------
  if (wanted("odometry")) {
    StageResult stage;
    stage.name = "odometry";
    StageTimer timer;
    if (fs::exists(trajectory_csv) && fs::exists(map_ply)) {
      stage.status = StageStatus::Resumed;
      stage.note = "outputs already present";
    } else {
      try {
        lio::OdometryInput input;
        input.imu = bundle.imu;
        input.scans = bundle.scans;
        input.imu_from_lidar = bundle.calibration.imu_from_lidar();
        const auto result = lio::run_odometry(input, config.odometry);
        io::write_trajectory_csv(result.trajectory, trajectory_csv);
        io::write_ply(result.map.to_cloud(), map_ply);
        stage.warnings = result.report.degenerate_scans + result.report.scans_skipped;
      } catch (const std::exception& e) {
        throw StageError("odometry", e.what());
      }
    }
    stage.seconds = timer.seconds();
    summary.stages.push_back(stage);
  }

  // --- colorize ---------------------------------------------------------
  if (wanted("colorize")) {
    StageResult stage;
    stage.name = "colorize";
    StageTimer timer;
    if (!fs::exists(trajectory_csv) || !fs::exists(map_ply)) {
      if (!stages.empty()) {
        throw StageError("colorize", "trajectory.csv / map.ply missing; run odometry first");
      }
    }
    if (fs::exists(colored_ply)) {
      stage.status = StageStatus::Resumed;
      stage.note = "output already present";
    } else if (bundle.frames.empty()) {
      stage.status = StageStatus::Skipped;
      stage.note = "bundle has no camera frames";
    } else {
      try {
        const auto trajectory = io::read_trajectory_csv(trajectory_csv);
        const auto map_points = io::read_ply(map_ply).cloud.points;
        const auto map =
            lio::MapStore::from_points(map_points, config.odometry.map_resolution);
        const auto frames = bundle.load_all_frames();
        color::ColorizeReport report;
        const auto colored = color::colorize_map(map, frames, trajectory, bundle.calibration,
                                                 config.colorize, &report);
        io::write_ply(colored, colored_ply);
        stage.warnings = report.frames_skipped;
      } catch (const std::exception& e) {
        throw StageError("colorize", e.what());
      }
    }
    stage.seconds = timer.seconds();
    summary.stages.push_back(stage);
  }

  // --- fruits -----------------------------------------------------------
  if (wanted("fruits")) {
    StageResult stage;
    stage.name = "fruits";
    StageTimer timer;
    if ((!fs::exists(trajectory_csv) || !fs::exists(map_ply)) && !stages.empty()) {
      throw StageError("fruits", "trajectory.csv / map.ply missing; run odometry first");
    }
    if (fs::exists(fruits_json_path)) {
      stage.status = StageStatus::Resumed;
      stage.note = "output already present";
    } else if (!bundle.detections_json && !bundle.labels_json) {
      stage.status = StageStatus::Skipped;
      stage.note = "no detections or labels in the bundle";
    } else {
      try {
        const auto trajectory = io::read_trajectory_csv(trajectory_csv);
        const auto map_points = io::read_ply(map_ply).cloud.points;
        const auto map =
            lio::MapStore::from_points(map_points, config.odometry.map_resolution);

        std::vector<fruits::FruitEstimate> estimates;
        if (bundle.detections_json) {
          const auto detections = io::detections_from_json(io::load_json(*bundle.detections_json));
          fruits::DetectionContext context;
          for (const auto& f : bundle.frames) context.frame_times.push_back(f.t);
          context.trajectory = trajectory;
          context.calib = bundle.calibration;
          fruits::LocalizeReport report;
          estimates =
              fruits::localize_from_detections(map, detections, context, config.fruits, &report);
          stage.warnings = report.detections_skipped + report.detections_empty;
        } else {
          const auto labels = io::labels_from_json(io::load_json(*bundle.labels_json));
          estimates = fruits::localize_from_labels(map, labels, config.fruits);
        }
        io::save_json(io::fruits_to_json(estimates), fruits_json_path);
      } catch (const std::exception& e) {
        throw StageError("fruits", e.what());
      }
    }
    stage.seconds = timer.seconds();
    summary.stages.push_back(stage);
  }

  // --- eval -------------------------------------------------------------
  if (wanted("eval")) {
    StageResult stage;
    stage.name = "eval";
    StageTimer timer;
    if (!fs::exists(map_ply) && !stages.empty()) {
      throw StageError("eval", "map.ply missing; run odometry first");
    }
    const bool configured = config.reference_ply && config.map_landmarks_json &&
                            config.reference_landmarks_json;
    if (fs::exists(registration_json)) {
      stage.status = StageStatus::Resumed;
      stage.note = "output already present";
    } else if (!configured) {
      stage.status = StageStatus::Skipped;
      stage.note = "no reference scan or landmarks configured";
    } else {
      try {
        const PointCloud reconstructed = io::read_ply(map_ply).cloud;
        const PointCloud reference = io::read_ply(*config.reference_ply).cloud;
        const auto src = io::landmarks_from_json(io::load_json(*config.map_landmarks_json));
        const auto dst =
            io::landmarks_from_json(io::load_json(*config.reference_landmarks_json));
        const auto result =
            reg::evaluate(reconstructed, reference, src, dst, config.eval_thresholds);
        io::save_json(io::registration_report_to_json(result.report), registration_json);
      } catch (const std::exception& e) {
        throw StageError("eval", e.what());
      }
    }
    stage.seconds = timer.seconds();
    summary.stages.push_back(stage);
  }

  json stage_array = json::array();
  for (const auto& s : summary.stages) stage_array.push_back(stage_to_json(s));
  const json summary_json{{"stages", stage_array},
                          {"config", pipeline_config_to_json(config)},
                          {"bundle", manifest_path.string()}};
  summary.summary_path = out / "summary.json";
  io::save_json(summary_json, summary.summary_path);
  return summary;
}

}  // namespace orchard
