#include "orchard/sim/scene.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace orchard::sim {

namespace {

constexpr double kRayEps = 1e-9;

// Nearest positive root of the ray/sphere quadratic, or nullopt.
std::optional<double> ray_sphere(const Vec3& o, const Vec3& d, const Vec3& c, double r) {
  const Vec3 m = o - c;
  const double b = m.dot(d);
  const double cc = m.squaredNorm() - r * r;
  const double disc = b * b - cc;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  double t = -b - s;
  if (t <= kRayEps) t = -b + s;
  if (t <= kRayEps) return std::nullopt;
  return t;
}

// Nearest positive intersection with the finite lateral surface.
std::optional<double> ray_cylinder(const Vec3& o, const Vec3& d, const Cylinder& cyl) {
  const Vec3 axis_vec = cyl.tip - cyl.base;
  const double len = axis_vec.norm();
  if (len <= 0.0) return std::nullopt;
  const Vec3 a = axis_vec / len;
  const Vec3 m = o - cyl.base;
  const Vec3 dp = d - d.dot(a) * a;
  const Vec3 mp = m - m.dot(a) * a;
  const double A = dp.squaredNorm();
  if (A < 1e-16) return std::nullopt;  // ray parallel to the axis
  const double B = mp.dot(dp);
  const double C = mp.squaredNorm() - cyl.radius * cyl.radius;
  const double disc = B * B - A * C;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  for (double t : {(-B - s) / A, (-B + s) / A}) {
    if (t <= kRayEps) continue;
    const double axial = (m + t * d).dot(a);
    if (axial >= 0.0 && axial <= len) return t;
  }
  return std::nullopt;
}

std::optional<double> ray_plane_z(const Vec3& o, const Vec3& d, double height) {
  if (std::abs(d.z()) < 1e-16) return std::nullopt;
  const double t = (height - o.z()) / d.z();
  if (t <= kRayEps) return std::nullopt;
  return t;
}

double cylinder_surface_distance(const Cylinder& cyl, const Vec3& p) {
  const Vec3 axis_vec = cyl.tip - cyl.base;
  const double len = axis_vec.norm();
  if (len <= 0.0) return std::numeric_limits<double>::infinity();
  const Vec3 a = axis_vec / len;
  const Vec3 m = p - cyl.base;
  const double axial = m.dot(a);
  const double radial = (m - axial * a).norm();
  if (axial >= 0.0 && axial <= len) return std::abs(radial - cyl.radius);
  const double overshoot = axial < 0.0 ? -axial : axial - len;
  return std::hypot(overshoot, radial - cyl.radius);
}

}  // namespace

void SceneSpec::validate() const {
  for (const auto& c : trunks) {
    if (!(c.radius > 0.0)) throw std::invalid_argument("scene: trunk radius must be > 0");
  }
  for (const auto& c : branches) {
    if (!(c.radius > 0.0)) throw std::invalid_argument("scene: branch radius must be > 0");
  }
  std::unordered_set<int> ids;
  for (const auto& f : fruits) {
    if (!(f.radius > 0.0)) throw std::invalid_argument("scene: fruit radius must be > 0");
    if (!ids.insert(f.id).second) {
      throw std::invalid_argument("scene: duplicate fruit id " + std::to_string(f.id));
    }
  }
}

std::optional<RayHit> cast_ray(const SceneSpec& scene, const Vec3& origin, const Vec3& dir,
                               double max_range) {
  std::optional<RayHit> best;
  const auto consider = [&](std::optional<double> t, Color color, PrimitiveKind kind,
                            std::size_t index) {
    if (!t || *t > max_range) return;
    if (best && best->range <= *t) return;
    best = RayHit{*t, origin + *t * dir, color, kind, index};
  };

  for (std::size_t i = 0; i < scene.trunks.size(); ++i) {
    consider(ray_cylinder(origin, dir, scene.trunks[i]), scene.trunks[i].color,
             PrimitiveKind::Trunk, i);
  }
  for (std::size_t i = 0; i < scene.branches.size(); ++i) {
    consider(ray_cylinder(origin, dir, scene.branches[i]), scene.branches[i].color,
             PrimitiveKind::Branch, i);
  }
  for (std::size_t i = 0; i < scene.fruits.size(); ++i) {
    consider(ray_sphere(origin, dir, scene.fruits[i].center, scene.fruits[i].radius),
             scene.fruits[i].color, PrimitiveKind::Fruit, i);
  }
  if (scene.ground) {
    consider(ray_plane_z(origin, dir, scene.ground->height), scene.ground->color,
             PrimitiveKind::Ground, 0);
  }
  return best;
}

double distance_to_surface(const SceneSpec& scene, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : scene.trunks) best = std::min(best, cylinder_surface_distance(c, p));
  for (const auto& c : scene.branches) best = std::min(best, cylinder_surface_distance(c, p));
  for (const auto& f : scene.fruits) {
    best = std::min(best, std::abs((p - f.center).norm() - f.radius));
  }
  if (scene.ground) best = std::min(best, std::abs(p.z() - scene.ground->height));
  return best;
}

}  // namespace orchard::sim
