#include "orchard/lio/map_store.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace orchard::lio {

MapStore::MapStore(double resolution) : resolution_(resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("MapStore: resolution must be > 0");
}

MapStore::Key MapStore::key_of(const Vec3& p) const {
  return Key{static_cast<std::int64_t>(std::floor(p.x() / resolution_)),
             static_cast<std::int64_t>(std::floor(p.y() / resolution_)),
             static_cast<std::int64_t>(std::floor(p.z() / resolution_))};
}

void MapStore::insert(const std::vector<Vec3>& world_points) {
  constexpr double kMinSeparation2 = 1e-12;  // (1e-6 m)^2
  for (const Vec3& p : world_points) {
    if (!p.allFinite()) continue;
    const Key key = key_of(p);
    if (occupied_.contains(key)) continue;
    if (!points_.empty() && nearest_dist2(p) < kMinSeparation2) continue;
    occupied_.insert(key);
    points_.push_back(p);
  }
  maybe_rebuild();
}

MapStore MapStore::from_points(const std::vector<Vec3>& points, double resolution) {
  MapStore map(resolution);
  map.points_ = points;
  for (const Vec3& p : points) map.occupied_.insert(map.key_of(p));
  map.index_.build(map.points_);
  map.indexed_ = map.points_.size();
  return map;
}

void MapStore::maybe_rebuild() {
  // Rebuilding after every batch keeps queries on the tree path; the linear
  // tail only covers points added within the current batch.
  if (points_.size() > indexed_) {
    index_.build(points_);
    indexed_ = points_.size();
  }
}

std::vector<Neighbor> MapStore::knn(const Vec3& query, std::size_t k) const {
  if (points_.empty()) throw std::runtime_error("empty index");
  std::vector<Neighbor> merged;
  if (indexed_ > 0) merged = index_.knn(query, k);
  for (std::size_t i = indexed_; i < points_.size(); ++i) {
    merged.push_back(Neighbor{i, (points_[i] - query).norm()});
  }
  std::sort(merged.begin(), merged.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  });
  if (merged.size() > k) merged.resize(k);
  return merged;
}

double MapStore::nearest_dist2(const Vec3& query) const {
  if (points_.empty()) throw std::runtime_error("empty index");
  double best = std::numeric_limits<double>::infinity();
  if (indexed_ > 0) best = index_.nearest_dist2(query);
  for (std::size_t i = indexed_; i < points_.size(); ++i) {
    best = std::min(best, (points_[i] - query).squaredNorm());
  }
  return best;
}

PointCloud MapStore::to_cloud() const {
  PointCloud cloud;
  cloud.frame = "world";
  cloud.points = points_;
  return cloud;
}

}  // namespace orchard::lio
