#include "orchard/color/colorizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "orchard/lio/filter.hpp"

namespace orchard::color {

namespace {

struct ProjectedPoint {
  bool usable = false;
  int px = 0, py = 0;
  double depth = 0.0;
};

std::vector<ProjectedPoint> project_all(const std::vector<Vec3>& points,
                                        const PoseSE3& camera_from_world,
                                        const CameraIntrinsics& intr) {
  std::vector<ProjectedPoint> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3 p_cam = camera_from_world * points[i];
    const auto proj = try_project(intr, p_cam);
    if (!proj || !proj->in_bounds) continue;
    out[i] = ProjectedPoint{true, proj->px, proj->py, p_cam.z()};
  }
  return out;
}

}  // namespace

std::vector<bool> visibility_mask(const std::vector<Vec3>& world_points,
                                  const PoseSE3& camera_from_world,
                                  const CameraIntrinsics& intrinsics,
                                  const VisibilityParams& params) {
  intrinsics.validate();
  const auto projected = project_all(world_points, camera_from_world, intrinsics);

  const int w = intrinsics.width, h = intrinsics.height;
  std::vector<double> zbuf(static_cast<std::size_t>(w) * h,
                           std::numeric_limits<double>::infinity());
  for (const auto& p : projected) {
    if (!p.usable) continue;
    double& cell = zbuf[static_cast<std::size_t>(p.py) * w + p.px];
    cell = std::min(cell, p.depth);
  }

  const int r = params.splat_radius_px;
  std::vector<bool> visible(world_points.size(), false);
  for (std::size_t i = 0; i < world_points.size(); ++i) {
    const auto& p = projected[i];
    if (!p.usable) continue;
    double window_min = std::numeric_limits<double>::infinity();
    for (int dy = -r; dy <= r; ++dy) {
      const int y = p.py + dy;
      if (y < 0 || y >= h) continue;
      for (int dx = -r; dx <= r; ++dx) {
        const int x = p.px + dx;
        if (x < 0 || x >= w) continue;
        window_min = std::min(window_min, zbuf[static_cast<std::size_t>(y) * w + x]);
      }
    }
    visible[i] = p.depth <= window_min + params.depth_tolerance;
  }
  return visible;
}

std::vector<Vec3> estimate_normals(const lio::MapStore& map, int k) {
  std::vector<Vec3> normals(map.size(), Vec3(0, 0, 1));
  if (map.size() < static_cast<std::size_t>(k)) return normals;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto neighbors = map.knn(map.point(i), static_cast<std::size_t>(k));
    Vec3 centroid = Vec3::Zero();
    for (const auto& n : neighbors) centroid += map.point(n.index);
    centroid /= static_cast<double>(neighbors.size());
    Mat3 scatter = Mat3::Zero();
    for (const auto& n : neighbors) {
      const Vec3 d = map.point(n.index) - centroid;
      scatter += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
    normals[i] = eig.eigenvectors().col(0);
  }
  return normals;
}

ColoredPointCloud colorize_map(const lio::MapStore& map,
                               const std::vector<CameraFrame>& frames,
                               const std::vector<TimedPose>& trajectory,
                               const CalibrationSet& calib, const ColorizeConfig& config,
                               ColorizeReport* report) {
  calib.intrinsics.validate();
  if (trajectory.empty()) throw std::invalid_argument("colorize_map: empty trajectory");

  const std::size_t n = map.size();
  std::vector<Eigen::Vector3d> sums(n, Eigen::Vector3d::Zero());
  std::vector<std::uint32_t> counts(n, 0);

  std::vector<Vec3> normals;
  if (config.min_view_cos > 0.0) normals = estimate_normals(map, config.normal_neighbors);

  ColorizeReport local;
  const PoseSE3 camera_from_body = calib.camera_from_imu();
  const double t_lo = trajectory.front().t;
  const double t_hi = trajectory.back().t;

  for (const CameraFrame& frame : frames) {
    if (frame.t < t_lo || frame.t > t_hi) {
      ++local.frames_skipped;
      continue;
    }
    const PoseSE3 body_pose = interpolate_pose(trajectory, frame.t);
    const PoseSE3 camera_from_world = camera_from_body * body_pose.inverse();
    const Vec3 camera_center = camera_from_world.inverse().translation;

    const auto projected = project_all(map.points(), camera_from_world, calib.intrinsics);
    const auto visible =
        visibility_mask(map.points(), camera_from_world, calib.intrinsics, config.visibility);

    for (std::size_t i = 0; i < n; ++i) {
      if (!visible[i] || !projected[i].usable) continue;
      if (!normals.empty()) {
        const Vec3 view = (map.point(i) - camera_center).normalized();
        if (std::abs(view.dot(normals[i])) < config.min_view_cos) continue;
      }
      const Color& c = frame.at(projected[i].px, projected[i].py);
      if (config.ignore_color && c == *config.ignore_color) {
        ++local.samples_ignored;
        continue;
      }
      sums[i] += Eigen::Vector3d(c[0], c[1], c[2]);
      counts[i] += 1;
      ++local.samples_accumulated;
    }
    ++local.frames_used;
  }

  ColoredPointCloud out;
  out.points = map.points();
  out.colors.assign(n, Color{0, 0, 0});
  out.counts = counts;
  for (std::size_t i = 0; i < n; ++i) {
    if (counts[i] == 0) continue;
    const Eigen::Vector3d mean = sums[i] / static_cast<double>(counts[i]);
    for (int c = 0; c < 3; ++c) {
      out.colors[i][c] = static_cast<std::uint8_t>(
          std::clamp(std::lround(mean[c]), 0L, 255L));
    }
  }
  if (report) *report = local;
  return out;
}

}  // namespace orchard::color
