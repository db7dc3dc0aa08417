#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "orchard/point_cloud.hpp"

namespace orchard::io {

enum class PlyErrorKind {
  MalformedHeader,
  TruncatedBody,
  UnsupportedProperty,
  UnsupportedFormat,
  Io,
};

class PlyError : public std::runtime_error {
 public:
  PlyError(PlyErrorKind kind, std::size_t byte_offset, const std::string& message)
      : std::runtime_error(message + " (byte " + std::to_string(byte_offset) + ")"),
        kind_(kind),
        byte_offset_(byte_offset) {}

  PlyErrorKind kind() const { return kind_; }
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  PlyErrorKind kind_;
  std::size_t byte_offset_;
};

// Points plus optional per-point color; times ride inside the cloud.
struct PlyData {
  PointCloud cloud;
  std::vector<Color> colors;  // empty or one per point

  bool has_colors() const { return !colors.empty(); }
};

// Reads ASCII or binary-little-endian PLY. Vertex properties x/y/z may be
// float32 or float64; red/green/blue must be uchar; time must be float64.
// Unknown scalar vertex properties are skipped; list properties and
// big-endian files are rejected.
PlyData read_ply(const std::filesystem::path& path);

struct PlyWriteOptions {
  bool ascii = false;  // binary-little-endian by default
};

// Writes x/y/z as float64; colors iff present; "property double time" iff
// the cloud carries per-point times. ASCII floats use enough digits to
// round-trip float64 exactly.
void write_ply(const PlyData& data, const std::filesystem::path& path,
               const PlyWriteOptions& options = {});

void write_ply(const PointCloud& cloud, const std::filesystem::path& path,
               const PlyWriteOptions& options = {});

void write_ply(const ColoredPointCloud& cloud, const std::filesystem::path& path,
               const PlyWriteOptions& options = {});

}  // namespace orchard::io
