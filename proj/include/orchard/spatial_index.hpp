#pragma once

#include <cstddef>
#include <vector>

#include "orchard/point_cloud.hpp"

namespace orchard {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;  // Euclidean, meters
};

// Exact k-nearest-neighbor / radius queries over a fixed point set.
// Results match a brute-force linear scan; ties in distance are broken by
// input index order. Queries are read-only and safe from multiple threads.
class SpatialIndex {
 public:
  SpatialIndex() = default;
  explicit SpatialIndex(const std::vector<Vec3>& points) { build(points); }
  explicit SpatialIndex(const PointCloud& cloud) { build(cloud.points); }

  void build(const std::vector<Vec3>& points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Vec3& point(std::size_t i) const { return points_[i]; }

  // The k nearest points in non-decreasing (distance, index) order. Fewer
  // than k returned only when the index holds fewer points. Throws
  // "empty index" when the index is empty, and rejects k < 1.
  std::vector<Neighbor> knn(const Vec3& query, std::size_t k) const;

  // All points within `radius` (inclusive), sorted by (distance, index).
  std::vector<Neighbor> radius_search(const Vec3& query, double radius) const;

  // Squared distance to the single nearest point. Throws on empty index.
  double nearest_dist2(const Vec3& query) const;

 private:
  struct Node {
    int axis = -1;          // -1 marks a leaf
    double split = 0.0;
    std::size_t begin = 0;  // range into order_ (leaves)
    std::size_t end = 0;
    int left = -1;
    int right = -1;
  };

  int build_range(std::size_t begin, std::size_t end);

  std::vector<Vec3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  int root_ = -1;

  static constexpr std::size_t kLeafSize = 16;
};

}  // namespace orchard
