#pragma once

#include <filesystem>
#include <json.hpp>

#include "orchard/camera.hpp"
#include "orchard/fruits/localizer.hpp"
#include "orchard/reg/registration.hpp"
#include "orchard/sim/scene.hpp"

namespace orchard::io {

using nlohmann::json;

// Rounds to 9 significant decimal digits; report serialization goes through
// this so byte-identical runs produce byte-identical JSON.
double round_sig9(double v);
json json_number(double v);

json load_json(const std::filesystem::path& path);
void save_json(const json& j, const std::filesystem::path& path);

// Calibration: intrinsics plus the camera<-LiDAR<-IMU pose chain.
json calibration_to_json(const CalibrationSet& calib);
CalibrationSet calibration_from_json(const json& j);

// Scene with fruit ground truth.
json scene_to_json(const sim::SceneSpec& scene);
sim::SceneSpec scene_from_json(const json& j);

// Detections: array of {frame_id, bbox:[u0,v0,u1,v1], class, confidence}.
json detections_to_json(const std::vector<fruits::Detection2D>& detections);
std::vector<fruits::Detection2D> detections_from_json(const json& j);

// Labels: array of {fruit_id, point_indices}.
json labels_to_json(const std::vector<fruits::LabelSelection>& labels);
std::vector<fruits::LabelSelection> labels_from_json(const json& j);

// Landmarks: array of {id, xyz:[x,y,z]}.
json landmarks_to_json(const reg::LandmarkSet& landmarks);
reg::LandmarkSet landmarks_from_json(const json& j);

// Fruits output: array of {id, center:[x,y,z], radius?, support, detections}.
json fruits_to_json(const std::vector<fruits::FruitEstimate>& fruits);
std::vector<fruits::FruitEstimate> fruits_from_json(const json& j);

// Registration report plus a metric description header.
json registration_report_to_json(const reg::RegistrationReport& report);

}  // namespace orchard::io
