#include "orchard/point_cloud.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace orchard {

void PointCloud::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) {
      throw std::invalid_argument("PointCloud: non-finite coordinate at point " +
                                  std::to_string(i));
    }
  }
  if (!times.empty()) {
    if (times.size() != points.size()) {
      throw std::invalid_argument("PointCloud: times length does not match point count");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (times[i] < times[i - 1]) {
        throw std::invalid_argument("PointCloud: decreasing timestamp at point " +
                                    std::to_string(i));
      }
    }
  }
}

PointCloud transform_points(const PoseSE3& pose, const PointCloud& cloud) {
  PointCloud out;
  out.frame = cloud.frame;
  out.times = cloud.times;
  out.points.reserve(cloud.points.size());
  for (const Vec3& p : cloud.points) out.points.push_back(pose * p);
  return out;
}

namespace {

struct VoxelKey {
  std::int64_t x, y, z;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::size_t h = std::hash<std::int64_t>{}(k.x);
    h ^= std::hash<std::int64_t>{}(k.y) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<std::int64_t>{}(k.z) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

VoxelKey voxel_key(const Vec3& p, double size) {
  return VoxelKey{static_cast<std::int64_t>(std::floor(p.x() / size)),
                  static_cast<std::int64_t>(std::floor(p.y() / size)),
                  static_cast<std::int64_t>(std::floor(p.z() / size))};
}

}  // namespace

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
  if (!(voxel_size > 0.0)) {
    throw std::invalid_argument("voxel_downsample: voxel_size must be positive");
  }
  struct Acc {
    Vec3 sum{0.0, 0.0, 0.0};
    std::size_t n = 0;
  };
  std::unordered_map<VoxelKey, std::size_t, VoxelKeyHash> slots;
  std::vector<Acc> accs;
  for (const Vec3& p : cloud.points) {
    const VoxelKey key = voxel_key(p, voxel_size);
    auto [it, inserted] = slots.try_emplace(key, accs.size());
    if (inserted) accs.emplace_back();
    Acc& a = accs[it->second];
    a.sum += p;
    a.n += 1;
  }
  PointCloud out;
  out.frame = cloud.frame;
  out.points.reserve(accs.size());
  for (const Acc& a : accs) out.points.push_back(a.sum / static_cast<double>(a.n));
  return out;
}

}  // namespace orchard
