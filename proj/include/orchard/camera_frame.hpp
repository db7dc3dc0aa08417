#pragma once

#include <vector>

#include "orchard/point_cloud.hpp"

namespace orchard {

// Timestamped RGB image, row-major.
struct CameraFrame {
  double t = 0.0;
  int width = 0, height = 0;
  std::vector<Color> pixels;

  const Color& at(int u, int v) const { return pixels[static_cast<std::size_t>(v) * width + u]; }
  Color& at(int u, int v) { return pixels[static_cast<std::size_t>(v) * width + u]; }
};

}  // namespace orchard
