#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "orchard/geometry.hpp"

namespace orchard {

using Color = std::array<std::uint8_t, 3>;

// Timestamped 3D points. `times` is either empty or one entry per point,
// non-decreasing within a scan.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<double> times;
  std::string frame;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_times() const { return !times.empty(); }

  void reserve(std::size_t n) {
    points.reserve(n);
    times.reserve(n);
  }

  // Throws if coordinates are non-finite, times are mismatched in length,
  // or times decrease.
  void validate() const;
};

// Map points plus per-point RGB and observation counts. A point is colored
// iff its count is >= 1; uncolored points keep the default color.
struct ColoredPointCloud {
  std::vector<Vec3> points;
  std::vector<Color> colors;
  std::vector<std::uint32_t> counts;

  std::size_t size() const { return points.size(); }
  std::size_t colored_count() const {
    std::size_t n = 0;
    for (auto c : counts) n += (c >= 1);
    return n;
  }
};

// Applies R*p + t to every point; timestamps and order preserved.
PointCloud transform_points(const PoseSE3& pose, const PointCloud& cloud);

// At most one representative point per voxel (the centroid of its members).
// Voxel keys come from floor(coordinate / voxel_size) per axis on the raw
// coordinates; output order follows first appearance of each voxel, so the
// result is deterministic for a fixed input order. Per-point times are
// dropped (a centroid has no single capture time).
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size);

}  // namespace orchard
