#include "orchard/sim/orchard_builder.hpp"

#include <cmath>
#include <stdexcept>

#include "orchard/rng.hpp"

namespace orchard::sim {

namespace {

constexpr Color kTrunkColor{120, 85, 45};
constexpr Color kBranchColor{105, 95, 55};
constexpr Color kGroundColor{75, 65, 45};

Color fruit_color(int id) {
  // Distinct per id (gcd tricks keep channels collision-free below id 100)
  // and disjoint from trunk/branch/ground/background colors.
  return Color{static_cast<std::uint8_t>(140 + (id * 37) % 100),
               static_cast<std::uint8_t>(50 + (id * 73) % 150),
               static_cast<std::uint8_t>(40 + (id * 101) % 211)};
}

}  // namespace

SceneSpec make_orchard_scene(const OrchardParams& params) {
  if (params.tree_count < 1) throw std::invalid_argument("orchard: need >= 1 tree");
  SceneSpec scene;
  scene.seed = params.seed;
  scene.ground = GroundPlane{0.0, kGroundColor};

  const double x0 = -0.5 * (params.tree_count - 1) * params.tree_spacing;
  for (int i = 0; i < params.tree_count; ++i) {
    const double x = x0 + i * params.tree_spacing;
    Cylinder trunk;
    trunk.base = Vec3(x, 0.0, 0.0);
    trunk.tip = Vec3(x, 0.0, params.trunk_height);
    trunk.radius = params.trunk_radius;
    trunk.color = kTrunkColor;
    scene.trunks.push_back(trunk);

    for (int j = 0; j < params.branches_per_tree; ++j) {
      const double az = 2.39996 * j + 0.7 * i;  // golden-angle fan per tree
      const double zb = 0.55 * params.trunk_height +
                        0.4 * params.trunk_height * j / std::max(1, params.branches_per_tree - 1);
      const Vec3 dir = Vec3(std::cos(az), std::sin(az), 0.45).normalized();
      Cylinder branch;
      branch.base = Vec3(x, 0.0, zb);
      branch.tip = branch.base + params.branch_length * dir;
      branch.radius = params.branch_radius;
      branch.color = kBranchColor;
      scene.branches.push_back(branch);
    }
  }

  SeededRng rng(params.seed);
  int placed = 0;
  int attempts = 0;
  const int max_attempts = params.fruit_count * 400;
  while (placed < params.fruit_count && attempts < max_attempts) {
    ++attempts;
    const auto& branch = scene.branches[rng.next_u64() % scene.branches.size()];
    const double radius = rng.uniform(params.fruit_radius_min, params.fruit_radius_max);
    Vec3 outward = branch.tip - branch.base;
    outward.z() = 0.0;
    if (outward.norm() < 1e-9) continue;
    outward.normalize();
    const double swing = rng.uniform(-0.5, 0.5);
    const Vec3 side(-outward.y(), outward.x(), 0.0);
    Vec3 center = branch.tip + (radius + params.fruit_clearance + rng.uniform(0.0, 0.15)) *
                                   (outward + swing * side).normalized();
    center.z() += rng.uniform(-0.15, 0.1);

    if (center.z() - radius < 0.4) continue;
    if (distance_to_surface(scene, center) < radius + params.fruit_clearance) continue;
    bool clear = true;
    for (const auto& f : scene.fruits) {
      if ((f.center - center).norm() < params.fruit_spacing) {
        clear = false;
        break;
      }
    }
    if (!clear) continue;

    FruitSphere fruit;
    fruit.center = center;
    fruit.radius = radius;
    fruit.id = placed;
    fruit.color = fruit_color(placed);
    scene.fruits.push_back(fruit);
    ++placed;
  }
  if (placed < params.fruit_count) {
    throw std::runtime_error("orchard: could not place requested fruit count; relax spacing");
  }
  scene.validate();
  return scene;
}

Vec3 orchard_center(const OrchardParams& params, double height) {
  (void)params;
  return Vec3(0.0, 0.0, height);
}

TrajectorySpec make_orbit_trajectory(const OrbitParams& params) {
  if (!(params.duration > params.dwell) || !(params.dwell >= 0.0)) {
    throw std::invalid_argument("orbit: need duration > dwell >= 0");
  }
  const double dt = 1.0 / params.imu_rate_hz;
  const double span = params.duration - params.dwell;
  const double dir_sign = params.clockwise ? -1.0 : 1.0;
  const double pitch_base = std::atan2(params.center.z() - params.height, params.radius);

  TrajectorySpec spec;
  spec.imu_rate_hz = params.imu_rate_hz;
  spec.lidar_rate_hz = params.lidar_rate_hz;
  spec.camera_rate_hz = params.camera_rate_hz;

  const auto n = static_cast<std::size_t>(std::llround(params.duration / dt));
  spec.keyframes.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = i * dt;
    // Raised-cosine arc progress: zero velocity and acceleration at both
    // ends and at the dwell junction.
    double s = 0.0;
    if (t > params.dwell) {
      const double tau = std::min(1.0, (t - params.dwell) / span);
      s = tau - std::sin(2.0 * M_PI * tau) / (2.0 * M_PI);
    }
    const double alpha = params.start_azimuth + dir_sign * 2.0 * M_PI * s;
    const Vec3 pos = Vec3(params.center.x() + params.radius * std::cos(alpha),
                          params.center.y() + params.radius * std::sin(alpha), params.height);
    const double yaw = alpha + M_PI;  // body x-axis faces the center
    const double pitch =
        pitch_base + params.pitch_amplitude * std::sin(2.0 * M_PI * params.pitch_cycles * s);
    const Rotation rot = Rotation::exp(Vec3(0, 0, yaw)) * Rotation::exp(Vec3(0, -pitch, 0));
    spec.keyframes.push_back(TimedPose{t, PoseSE3(rot, pos)});
  }
  spec.validate();
  return spec;
}

}  // namespace orchard::sim
