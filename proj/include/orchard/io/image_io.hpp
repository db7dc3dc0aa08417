#pragma once

#include <filesystem>

#include "orchard/camera_frame.hpp"

namespace orchard::io {

// Binary PPM (P6, maxval 255). The frame timestamp is not stored in the
// file; it comes from the bundle's frame index.
CameraFrame read_ppm(const std::filesystem::path& path);
void write_ppm(const CameraFrame& frame, const std::filesystem::path& path);

}  // namespace orchard::io
