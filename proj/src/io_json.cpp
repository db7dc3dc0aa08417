#include "orchard/io/json_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace orchard::io {

double round_sig9(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::strtod(buf, nullptr);
}

json json_number(double v) { return json(round_sig9(v)); }

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return j;
}

void save_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json pose_to_json(const PoseSE3& pose) {
  return json{{"q", json::array({pose.rotation.w(), pose.rotation.x(), pose.rotation.y(),
                                 pose.rotation.z()})},
              {"t", vec3_to_json(pose.translation)}};
}

PoseSE3 pose_from_json(const json& j) {
  const json& q = j.at("q");
  if (!q.is_array() || q.size() != 4) throw std::runtime_error("expected q = [w, x, y, z]");
  return PoseSE3(
      Rotation(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>()),
      vec3_from_json(j.at("t")));
}

json color_to_json(const Color& c) { return json::array({c[0], c[1], c[2]}); }

Color color_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected [r, g, b]");
  return Color{j[0].get<std::uint8_t>(), j[1].get<std::uint8_t>(), j[2].get<std::uint8_t>()};
}

json cylinder_to_json(const sim::Cylinder& c) {
  return json{{"base", vec3_to_json(c.base)},
              {"tip", vec3_to_json(c.tip)},
              {"radius", c.radius},
              {"color", color_to_json(c.color)}};
}

sim::Cylinder cylinder_from_json(const json& j) {
  sim::Cylinder c;
  c.base = vec3_from_json(j.at("base"));
  c.tip = vec3_from_json(j.at("tip"));
  c.radius = j.at("radius").get<double>();
  c.color = color_from_json(j.at("color"));
  return c;
}

}  // namespace

json calibration_to_json(const CalibrationSet& calib) {
  const CameraIntrinsics& i = calib.intrinsics;
  return json{{"intrinsics",
               {{"fx", i.fx},
                {"fy", i.fy},
                {"cx", i.cx},
                {"cy", i.cy},
                {"width", i.width},
                {"height", i.height},
                {"k1", i.k1},
                {"k2", i.k2}}},
              {"camera_from_lidar", pose_to_json(calib.camera_from_lidar)},
              {"lidar_from_imu", pose_to_json(calib.lidar_from_imu)}};
}

CalibrationSet calibration_from_json(const json& j) {
  CalibrationSet calib;
  const json& i = j.at("intrinsics");
  calib.intrinsics.fx = i.at("fx").get<double>();
  calib.intrinsics.fy = i.at("fy").get<double>();
  calib.intrinsics.cx = i.at("cx").get<double>();
  calib.intrinsics.cy = i.at("cy").get<double>();
  calib.intrinsics.width = i.at("width").get<int>();
  calib.intrinsics.height = i.at("height").get<int>();
  calib.intrinsics.k1 = i.value("k1", 0.0);
  calib.intrinsics.k2 = i.value("k2", 0.0);
  calib.intrinsics.validate();
  calib.camera_from_lidar = pose_from_json(j.at("camera_from_lidar"));
  calib.lidar_from_imu = pose_from_json(j.at("lidar_from_imu"));
  return calib;
}

json scene_to_json(const sim::SceneSpec& scene) {
  json trunks = json::array();
  for (const auto& c : scene.trunks) trunks.push_back(cylinder_to_json(c));
  json branches = json::array();
  for (const auto& c : scene.branches) branches.push_back(cylinder_to_json(c));
  json fruits = json::array();
  for (const auto& f : scene.fruits) {
    fruits.push_back(json{{"id", f.id},
                          {"center", vec3_to_json(f.center)},
                          {"radius", f.radius},
                          {"color", color_to_json(f.color)}});
  }
  json j{{"trunks", trunks}, {"branches", branches}, {"fruits", fruits}, {"seed", scene.seed}};
  if (scene.ground) {
    j["ground"] = json{{"height", scene.ground->height}, {"color", color_to_json(scene.ground->color)}};
  }
  return j;
}

sim::SceneSpec scene_from_json(const json& j) {
  sim::SceneSpec scene;
  for (const auto& c : j.at("trunks")) scene.trunks.push_back(cylinder_from_json(c));
  for (const auto& c : j.at("branches")) scene.branches.push_back(cylinder_from_json(c));
  for (const auto& f : j.at("fruits")) {
    sim::FruitSphere fruit;
    fruit.id = f.at("id").get<int>();
    fruit.center = vec3_from_json(f.at("center"));
    fruit.radius = f.at("radius").get<double>();
    fruit.color = color_from_json(f.at("color"));
    scene.fruits.push_back(fruit);
  }
  if (j.contains("ground")) {
    scene.ground = sim::GroundPlane{j["ground"].at("height").get<double>(),
                                    color_from_json(j["ground"].at("color"))};
  }
  scene.seed = j.value("seed", 0ULL);
  scene.validate();
  return scene;
}

json detections_to_json(const std::vector<fruits::Detection2D>& detections) {
  json arr = json::array();
  for (const auto& d : detections) {
    arr.push_back(json{{"frame_id", d.frame_id},
                       {"bbox", json::array({d.u_min, d.v_min, d.u_max, d.v_max})},
                       {"class", d.label},
                       {"confidence", d.confidence}});
  }
  return arr;
}

std::vector<fruits::Detection2D> detections_from_json(const json& j) {
  if (!j.is_array()) throw std::runtime_error("detections: expected a JSON array");
  std::vector<fruits::Detection2D> out;
  for (const auto& e : j) {
    fruits::Detection2D d;
    d.frame_id = e.at("frame_id").get<int>();
    const json& box = e.at("bbox");
    if (!box.is_array() || box.size() != 4) {
      throw std::runtime_error("detections: bbox must be [u0, v0, u1, v1]");
    }
    d.u_min = box[0].get<double>();
    d.v_min = box[1].get<double>();
    d.u_max = box[2].get<double>();
    d.v_max = box[3].get<double>();
    d.label = e.value("class", "fruit");
    d.confidence = e.value("confidence", 1.0);
    out.push_back(d);
  }
  return out;
}

json labels_to_json(const std::vector<fruits::LabelSelection>& labels) {
  json arr = json::array();
  for (const auto& l : labels) {
    arr.push_back(json{{"fruit_id", l.fruit_id}, {"point_indices", l.point_indices}});
  }
  return arr;
}

std::vector<fruits::LabelSelection> labels_from_json(const json& j) {
  if (!j.is_array()) throw std::runtime_error("labels: expected a JSON array");
  std::vector<fruits::LabelSelection> out;
  for (const auto& e : j) {
    fruits::LabelSelection l;
    l.fruit_id = e.at("fruit_id").get<int>();
    l.point_indices = e.at("point_indices").get<std::vector<std::size_t>>();
    out.push_back(std::move(l));
  }
  return out;
}

json landmarks_to_json(const reg::LandmarkSet& landmarks) {
  json arr = json::array();
  for (const auto& l : landmarks) {
    arr.push_back(json{{"id", l.id}, {"xyz", vec3_to_json(l.position)}});
  }
  return arr;
}

reg::LandmarkSet landmarks_from_json(const json& j) {
  if (!j.is_array()) throw std::runtime_error("landmarks: expected a JSON array");
  reg::LandmarkSet out;
  for (const auto& e : j) {
    out.push_back(reg::Landmark{e.at("id").get<int>(), vec3_from_json(e.at("xyz"))});
  }
  return out;
}

json fruits_to_json(const std::vector<fruits::FruitEstimate>& fruits) {
  json arr = json::array();
  for (const auto& f : fruits) {
    json e{{"id", f.id},
           {"center", json::array({json_number(f.center.x()), json_number(f.center.y()),
                                   json_number(f.center.z())})},
           {"support", f.support},
           {"detections", f.detection_ids}};
    if (f.radius) e["radius"] = json_number(*f.radius);
    arr.push_back(e);
  }
  return arr;
}

std::vector<fruits::FruitEstimate> fruits_from_json(const json& j) {
  if (!j.is_array()) throw std::runtime_error("fruits: expected a JSON array");
  std::vector<fruits::FruitEstimate> out;
  for (const auto& e : j) {
    fruits::FruitEstimate f;
    f.id = e.at("id").get<int>();
    f.center = vec3_from_json(e.at("center"));
    f.support = e.at("support").get<std::size_t>();
    f.detection_ids = e.value("detections", std::vector<int>{});
    if (e.contains("radius")) f.radius = e["radius"].get<double>();
    out.push_back(std::move(f));
  }
  return out;
}

json registration_report_to_json(const reg::RegistrationReport& report) {
  json thresholds = json::array();
  for (double d : report.thresholds) thresholds.push_back(json_number(d));
  json ratios = json::array();
  for (double r : report.ratios) ratios.push_back(json_number(r));
  return json{
      {"metric",
       "bidirectional average ratio: r_d counts points of either cloud whose nearest "
       "neighbor in the other cloud lies within d; AR is the mean of r_d over thresholds"},
      {"thresholds", thresholds},
      {"ratios", ratios},
      {"average_ratio", json_number(report.average_ratio)},
      {"count_a", report.count_a},
      {"count_b", report.count_b}};
}

}  // namespace orchard::io
