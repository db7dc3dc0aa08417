#include "orchard/camera.hpp"

namespace orchard {

std::optional<PixelProjection> try_project(const CameraIntrinsics& intr, const Vec3& p_cam) {
  if (!(p_cam.z() > kMinCameraDepth)) return std::nullopt;
  const double xn = p_cam.x() / p_cam.z();
  const double yn = p_cam.y() / p_cam.z();
  const double r2 = xn * xn + yn * yn;
  const double d = 1.0 + r2 * (intr.k1 + intr.k2 * r2);
  PixelProjection out;
  out.u = intr.fx * xn * d + intr.cx;
  out.v = intr.fy * yn * d + intr.cy;
  out.px = static_cast<int>(std::lround(out.u));
  out.py = static_cast<int>(std::lround(out.v));
  out.in_bounds =
      out.px >= 0 && out.px < intr.width && out.py >= 0 && out.py < intr.height;
  return out;
}

PixelProjection project_point(const CameraIntrinsics& intr, const Vec3& p_cam) {
  auto proj = try_project(intr, p_cam);
  if (!proj) throw std::domain_error("behind camera");
  return *proj;
}

double undistort_radius(const CameraIntrinsics& intr, double r_distorted) {
  if (r_distorted == 0.0) return 0.0;
  double r = r_distorted;
  for (int i = 0; i < 20; ++i) {
    const double r2 = r * r;
    const double f = r * (1.0 + r2 * (intr.k1 + intr.k2 * r2)) - r_distorted;
    const double df = 1.0 + r2 * (3.0 * intr.k1 + 5.0 * intr.k2 * r2);
    const double step = f / df;
    r -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return r;
}

Vec3 unproject(const CameraIntrinsics& intr, double u, double v, double depth) {
  const double xd = (u - intr.cx) / intr.fx;
  const double yd = (v - intr.cy) / intr.fy;
  const double rd = std::sqrt(xd * xd + yd * yd);
  double scale = 1.0;
  if (rd > 0.0) {
    const double ru = undistort_radius(intr, rd);
    scale = ru / rd;
  }
  return Vec3(xd * scale * depth, yd * scale * depth, depth);
}

Vec3 pixel_ray(const CameraIntrinsics& intr, double u, double v) {
  return unproject(intr, u, v, 1.0).normalized();
}

}  // namespace orchard
