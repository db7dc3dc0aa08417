// Command-line front end: simulate | odometry | colorize | fruits | eval |
// pipeline. Flags mirror the pipeline config; a config file can set any
// field and flags override it. Exit codes: 0 ok, 2 validation, 3 odometry,
// 4 colorize, 5 fruits, 6 eval, 1 anything else.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "orchard/io/image_io.hpp"
#include "orchard/io/ply.hpp"
#include "orchard/pipeline.hpp"

namespace fs = std::filesystem;
using namespace orchard;

namespace {

int exit_code_for_stage(const std::string& stage) {
  if (stage == "validate") return 2;
  if (stage == "odometry") return 3;
  if (stage == "colorize") return 4;
  if (stage == "fruits") return 5;
  if (stage == "eval") return 6;
  return 1;
}

CalibrationSet default_calibration(int width, int height) {
  CalibrationSet calib;
  calib.intrinsics.width = width;
  calib.intrinsics.height = height;
  calib.intrinsics.fx = 0.8 * width;
  calib.intrinsics.fy = 0.8 * width;
  calib.intrinsics.cx = 0.5 * width;
  calib.intrinsics.cy = 0.5 * height;
  // Camera looks along body +x: z_cam = x_body, x_cam = -y_body, y_cam = -z_body.
  Mat3 r_cb;
  r_cb << 0, -1, 0, 0, 0, -1, 1, 0, 0;
  calib.camera_from_lidar = PoseSE3(Rotation(r_cb), Vec3(0.02, -0.01, 0.05));
  calib.lidar_from_imu = PoseSE3(Rotation::identity(), Vec3(0.0, 0.0, -0.08));
  return calib;
}

struct SimulateArgs {
  std::string out_dir = "bundle";
  std::uint64_t seed = 1;
  int trees = 2;
  int fruit_count = 20;
  double duration = 20.0;
  double orbit_radius = 1.8;
  double orbit_height = 1.2;
  double imu_rate = 200.0;
  double lidar_rate = 10.0;
  double camera_rate = 2.0;
  double gyro_noise = 0.0;
  double accel_noise = 0.0;
  double range_noise = 0.0;
  int lidar_rings = 16;
  int lidar_azimuth_steps = 500;
  int image_width = 480;
  int image_height = 360;
  double pitch_amplitude = 0.12;
  bool no_detections = false;
};

int run_simulate(const SimulateArgs& args) {
  sim::OrchardParams orchard_params;
  orchard_params.tree_count = args.trees;
  orchard_params.fruit_count = args.fruit_count;
  orchard_params.seed = args.seed;

  io::BundleSimConfig config;
  config.scene = sim::make_orchard_scene(orchard_params);
  sim::OrbitParams orbit;
  orbit.center = sim::orchard_center(orchard_params, 1.2);
  orbit.radius = args.orbit_radius;
  orbit.height = args.orbit_height;
  orbit.duration = args.duration;
  orbit.pitch_amplitude = args.pitch_amplitude;
  orbit.imu_rate_hz = args.imu_rate;
  orbit.lidar_rate_hz = args.lidar_rate;
  orbit.camera_rate_hz = args.camera_rate;
  config.trajectory = sim::make_orbit_trajectory(orbit);
  config.lidar_pattern = sim::make_lidar_pattern(args.lidar_rings, -15.0, 15.0,
                                                 args.lidar_azimuth_steps, 40.0,
                                                 0.9 / args.lidar_rate);
  config.calibration = default_calibration(args.image_width, args.image_height);
  config.imu_noise.gyro_noise_density = args.gyro_noise;
  config.imu_noise.accel_noise_density = args.accel_noise;
  config.lidar_range_sigma = args.range_noise;
  config.seed = args.seed;
  config.write_detections = !args.no_detections;

  const fs::path manifest = io::write_sim_bundle(config, args.out_dir);
  std::cout << "bundle written: " << manifest.string() << "\n";
  return 0;
}

PipelineConfig load_config(const std::string& config_path) {
  PipelineConfig config;
  if (!config_path.empty()) {
    config = pipeline_config_from_json(io::load_json(config_path), config);
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline LiDAR-inertial-camera fruit mapping toolkit"};
  app.require_subcommand(1);

  // ---- simulate --------------------------------------------------------
  SimulateArgs sim_args;
  auto* cmd_sim = app.add_subcommand("simulate", "Generate a synthetic orchard log bundle");
  cmd_sim->add_option("--out", sim_args.out_dir, "Output bundle directory");
  cmd_sim->add_option("--seed", sim_args.seed, "RNG seed");
  cmd_sim->add_option("--trees", sim_args.trees, "Tree count");
  cmd_sim->add_option("--fruits", sim_args.fruit_count, "Fruit count");
  cmd_sim->add_option("--duration", sim_args.duration, "Trajectory duration, s");
  cmd_sim->add_option("--orbit-radius", sim_args.orbit_radius, "Orbit radius, m");
  cmd_sim->add_option("--orbit-height", sim_args.orbit_height, "Device height, m");
  cmd_sim->add_option("--imu-rate", sim_args.imu_rate, "IMU rate, Hz");
  cmd_sim->add_option("--lidar-rate", sim_args.lidar_rate, "LiDAR rate, Hz");
  cmd_sim->add_option("--camera-rate", sim_args.camera_rate, "Camera rate, Hz");
  cmd_sim->add_option("--gyro-noise", sim_args.gyro_noise, "Gyro noise density, rad/s/sqrt(Hz)");
  cmd_sim->add_option("--accel-noise", sim_args.accel_noise,
                      "Accel noise density, m/s^2/sqrt(Hz)");
  cmd_sim->add_option("--range-noise", sim_args.range_noise, "LiDAR range sigma, m");
  cmd_sim->add_option("--rings", sim_args.lidar_rings, "LiDAR ring count");
  cmd_sim->add_option("--azimuth-steps", sim_args.lidar_azimuth_steps, "Rays per ring");
  cmd_sim->add_option("--image-width", sim_args.image_width, "Camera width, px");
  cmd_sim->add_option("--image-height", sim_args.image_height, "Camera height, px");
  cmd_sim->add_option("--pitch-amplitude", sim_args.pitch_amplitude, "Pitch sway, rad");
  cmd_sim->add_flag("--no-detections", sim_args.no_detections,
                    "Skip ground-truth detection generation");

  // ---- shared pipeline options ------------------------------------------
  std::string bundle_path, config_path, output_dir;
  const auto add_common = [&](CLI::App* cmd, bool needs_bundle = true) {
    if (needs_bundle) {
      cmd->add_option("--bundle", bundle_path, "Path to bundle manifest.json")->required();
    }
    cmd->add_option("--config", config_path, "Pipeline config JSON");
    cmd->add_option("--out", output_dir, "Output directory");
  };

  auto* cmd_odo = app.add_subcommand("odometry", "Run LiDAR-inertial odometry on a bundle");
  add_common(cmd_odo);
  auto* cmd_color = app.add_subcommand("colorize", "Colorize the map from camera frames");
  add_common(cmd_color);
  auto* cmd_fruits = app.add_subcommand("fruits", "Localize fruits from detections or labels");
  add_common(cmd_fruits);

  auto* cmd_pipe = app.add_subcommand("pipeline", "Run every stage in order");
  add_common(cmd_pipe);
  std::string reference_ply, landmarks_map, landmarks_ref;
  std::vector<double> thresholds;
  cmd_pipe->add_option("--reference", reference_ply, "Reference scan PLY for evaluation");
  cmd_pipe->add_option("--landmarks-map", landmarks_map, "Landmarks JSON in map frame");
  cmd_pipe->add_option("--landmarks-reference", landmarks_ref,
                       "Landmarks JSON in reference frame");
  cmd_pipe->add_option("--thresholds", thresholds, "Evaluation distance thresholds, m");

  // ---- standalone eval ---------------------------------------------------
  auto* cmd_eval = app.add_subcommand("eval", "Landmark alignment + average-ratio score");
  std::string eval_a, eval_b, eval_lm_a, eval_lm_b, eval_out;
  std::vector<double> eval_thresholds{0.1, 0.5, 1.0, 2.0};
  cmd_eval->add_option("--reconstructed", eval_a, "Reconstructed cloud PLY")->required();
  cmd_eval->add_option("--reference", eval_b, "Reference cloud PLY")->required();
  cmd_eval->add_option("--landmarks-reconstructed", eval_lm_a, "Landmarks JSON")->required();
  cmd_eval->add_option("--landmarks-reference", eval_lm_b, "Landmarks JSON")->required();
  cmd_eval->add_option("--thresholds", eval_thresholds, "Distance thresholds, m");
  cmd_eval->add_option("--out", eval_out, "Report JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_sim->parsed()) return run_simulate(sim_args);

    if (cmd_eval->parsed()) {
      const PointCloud a = io::read_ply(eval_a).cloud;
      const PointCloud b = io::read_ply(eval_b).cloud;
      const auto lm_a = io::landmarks_from_json(io::load_json(eval_lm_a));
      const auto lm_b = io::landmarks_from_json(io::load_json(eval_lm_b));
      const auto result = reg::evaluate(a, b, lm_a, lm_b, eval_thresholds);

      std::printf("%-12s %s\n", "threshold", "ratio");
      for (std::size_t i = 0; i < result.report.thresholds.size(); ++i) {
        std::printf("%-12.3f %.6f\n", result.report.thresholds[i], result.report.ratios[i]);
      }
      std::printf("%-12s %.6f\n", "AR", result.report.average_ratio);
      if (!eval_out.empty()) {
        io::save_json(io::registration_report_to_json(result.report), eval_out);
      }
      return 0;
    }

    PipelineConfig config = load_config(config_path);
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (cmd_pipe->parsed()) {
      if (!reference_ply.empty()) config.reference_ply = reference_ply;
      if (!landmarks_map.empty()) config.map_landmarks_json = landmarks_map;
      if (!landmarks_ref.empty()) config.reference_landmarks_json = landmarks_ref;
      if (!thresholds.empty()) config.eval_thresholds = thresholds;
    }

    std::vector<std::string> stages;
    if (cmd_odo->parsed()) stages = {"odometry"};
    if (cmd_color->parsed()) stages = {"colorize"};
    if (cmd_fruits->parsed()) stages = {"fruits"};
    const PipelineSummary summary = run_pipeline(bundle_path, config, stages);
    for (const auto& stage : summary.stages) {
      const char* status = stage.status == StageStatus::Done      ? "done"
                           : stage.status == StageStatus::Resumed ? "resumed"
                                                                  : "skipped";
      std::printf("%-10s %-8s %8.2fs  warnings=%d %s\n", stage.name.c_str(), status,
                  stage.seconds, stage.warnings, stage.note.c_str());
    }
    std::printf("summary: %s\n", summary.summary_path.string().c_str());
    return 0;
  } catch (const StageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for_stage(e.stage());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
