#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "orchard/point_cloud.hpp"

namespace orchard::sim {

// Flat-shaded analytic primitives. Exact ray intersections make simulated
// measurements assertable to machine precision.

struct Cylinder {
  Vec3 base{0, 0, 0};  // axis segment endpoints
  Vec3 tip{0, 0, 1};
  double radius = 0.1;
  Color color{120, 80, 40};
};

struct FruitSphere {
  Vec3 center{0, 0, 0};
  double radius = 0.04;
  Color color{200, 30, 30};
  int id = 0;
};

struct GroundPlane {
  double height = 0.0;  // plane z = height
  Color color{90, 70, 50};
};

// Background color rendered where no primitive is hit. Reserved: scene
// primitives must not use it.
inline constexpr Color kBackgroundColor{255, 0, 255};

struct SceneSpec {
  std::vector<Cylinder> trunks;
  std::vector<Cylinder> branches;
  std::vector<FruitSphere> fruits;
  std::optional<GroundPlane> ground;
  std::uint64_t seed = 0;

  // Radii must be positive, fruit ids unique.
  void validate() const;
};

enum class PrimitiveKind { Trunk, Branch, Fruit, Ground };

struct RayHit {
  double range = 0.0;  // along the (unit) ray direction
  Vec3 point{0, 0, 0};
  Color color{0, 0, 0};
  PrimitiveKind kind = PrimitiveKind::Ground;
  std::size_t index = 0;  // index within its kind's list
};

// Nearest intersection of the ray (origin, unit dir) with the scene.
std::optional<RayHit> cast_ray(const SceneSpec& scene, const Vec3& origin, const Vec3& dir,
                               double max_range = std::numeric_limits<double>::infinity());

// Distance from a point to the nearest primitive surface. Used to verify
// that simulated returns lie on scene geometry.
double distance_to_surface(const SceneSpec& scene, const Vec3& p);

}  // namespace orchard::sim
