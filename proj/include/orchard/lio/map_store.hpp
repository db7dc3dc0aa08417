#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "orchard/point_cloud.hpp"
#include "orchard/spatial_index.hpp"

namespace orchard::lio {

// World-frame map with voxel-gated insertion and an incrementally usable
// exact nearest-neighbor index (static kd-tree over the bulk plus a linear
// tail, rebuilt when the tail grows). Queries are read-only; insertion must
// not race with queries.
class MapStore {
 public:
  explicit MapStore(double resolution = 0.05);

  double resolution() const { return resolution_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Vec3>& points() const { return points_; }
  const Vec3& point(std::size_t i) const { return points_[i]; }

  // Adds world-frame points subject to voxel occupancy gating (first point
  // into a voxel wins) and exact-duplicate rejection (no two stored points
  // closer than 1e-6 m). Points never leave the map.
  void insert(const std::vector<Vec3>& world_points);
  void insert(const PointCloud& world_cloud) { insert(world_cloud.points); }

  // Bulk-load of an already-gated point set (a serialized map): order is
  // preserved and no gating is applied, so indices match the source file.
  static MapStore from_points(const std::vector<Vec3>& points, double resolution);

  std::vector<Neighbor> knn(const Vec3& query, std::size_t k) const;
  double nearest_dist2(const Vec3& query) const;

  PointCloud to_cloud() const;

 private:
  struct Key {
    std::int64_t x, y, z;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = std::hash<std::int64_t>{}(k.x);
      h ^= std::hash<std::int64_t>{}(k.y) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h ^= std::hash<std::int64_t>{}(k.z) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      return h;
    }
  };

  Key key_of(const Vec3& p) const;
  void maybe_rebuild();

  double resolution_;
  std::vector<Vec3> points_;
  std::unordered_set<Key, KeyHash> occupied_;
  SpatialIndex index_;        // covers points_[0..indexed_)
  std::size_t indexed_ = 0;   // tail beyond this is scanned linearly
};

}  // namespace orchard::lio
