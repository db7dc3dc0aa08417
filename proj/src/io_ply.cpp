#include "orchard/io/ply.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "binary PLY codec assumes a little-endian host");

namespace orchard::io {

namespace {

enum class ScalarType { Char, UChar, Short, UShort, Int, UInt, Float, Double };

std::optional<ScalarType> parse_scalar_type(const std::string& token) {
  if (token == "char" || token == "int8") return ScalarType::Char;
  if (token == "uchar" || token == "uint8") return ScalarType::UChar;
  if (token == "short" || token == "int16") return ScalarType::Short;
  if (token == "ushort" || token == "uint16") return ScalarType::UShort;
  if (token == "int" || token == "int32") return ScalarType::Int;
  if (token == "uint" || token == "uint32") return ScalarType::UInt;
  if (token == "float" || token == "float32") return ScalarType::Float;
  if (token == "double" || token == "float64") return ScalarType::Double;
  return std::nullopt;
}

std::size_t scalar_size(ScalarType t) {
  switch (t) {
    case ScalarType::Char:
    case ScalarType::UChar:
      return 1;
    case ScalarType::Short:
    case ScalarType::UShort:
      return 2;
    case ScalarType::Int:
    case ScalarType::UInt:
    case ScalarType::Float:
      return 4;
    case ScalarType::Double:
      return 8;
  }
  return 0;
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::Float;
};

struct VertexLayout {
  std::vector<Property> properties;
  int ix = -1, iy = -1, iz = -1;
  int ired = -1, igreen = -1, iblue = -1;
  int itime = -1;
};

double decode_scalar(const unsigned char* bytes, ScalarType t) {
  switch (t) {
    case ScalarType::Char: {
      signed char v;
      std::memcpy(&v, bytes, 1);
      return v;
    }
    case ScalarType::UChar: {
      unsigned char v;
      std::memcpy(&v, bytes, 1);
      return v;
    }
    case ScalarType::Short: {
      std::int16_t v;
      std::memcpy(&v, bytes, 2);
      return v;
    }
    case ScalarType::UShort: {
      std::uint16_t v;
      std::memcpy(&v, bytes, 2);
      return v;
    }
    case ScalarType::Int: {
      std::int32_t v;
      std::memcpy(&v, bytes, 4);
      return v;
    }
    case ScalarType::UInt: {
      std::uint32_t v;
      std::memcpy(&v, bytes, 4);
      return v;
    }
    case ScalarType::Float: {
      float v;
      std::memcpy(&v, bytes, 4);
      return v;
    }
    case ScalarType::Double: {
      double v;
      std::memcpy(&v, bytes, 8);
      return v;
    }
  }
  return 0.0;
}

// Reads one header line; newline excluded, offset advanced past it.
std::string read_header_line(std::istream& in, std::size_t& offset) {
  std::string line;
  if (!std::getline(in, line)) {
    throw PlyError(PlyErrorKind::MalformedHeader, offset, "unexpected end of header");
  }
  offset += line.size() + 1;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

PlyData read_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PlyError(PlyErrorKind::Io, 0, "cannot open " + path.string());

  std::size_t offset = 0;
  if (read_header_line(in, offset) != "ply") {
    throw PlyError(PlyErrorKind::MalformedHeader, 0, "missing 'ply' magic");
  }

  bool binary = false;
  bool have_format = false;
  std::size_t vertex_count = 0;
  bool in_vertex_element = false;
  bool seen_vertex_element = false;
  VertexLayout layout;

  while (true) {
    const std::size_t line_offset = offset;
    const std::string line = read_header_line(in, offset);
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;

    if (keyword == "comment" || keyword == "obj_info" || keyword.empty()) continue;
    if (keyword == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii") {
        binary = false;
      } else if (fmt == "binary_little_endian") {
        binary = true;
      } else if (fmt == "binary_big_endian") {
        throw PlyError(PlyErrorKind::UnsupportedFormat, line_offset,
                       "big-endian PLY is not supported");
      } else {
        throw PlyError(PlyErrorKind::MalformedHeader, line_offset, "unknown format '" + fmt + "'");
      }
      have_format = true;
    } else if (keyword == "element") {
      std::string name;
      long long count = -1;
      ls >> name >> count;
      if (name.empty() || count < 0) {
        throw PlyError(PlyErrorKind::MalformedHeader, line_offset, "malformed element line");
      }
      if (name == "vertex") {
        if (seen_vertex_element) {
          throw PlyError(PlyErrorKind::MalformedHeader, line_offset, "duplicate vertex element");
        }
        vertex_count = static_cast<std::size_t>(count);
        in_vertex_element = true;
        seen_vertex_element = true;
      } else {
        if (!seen_vertex_element && count > 0) {
          throw PlyError(PlyErrorKind::UnsupportedProperty, line_offset,
                         "element '" + name + "' precedes vertex data");
        }
        in_vertex_element = false;
      }
    } else if (keyword == "property") {
      if (!in_vertex_element) continue;  // trailing elements are ignored
      std::string type_token;
      ls >> type_token;
      if (type_token == "list") {
        throw PlyError(PlyErrorKind::UnsupportedProperty, line_offset,
                       "list property in vertex element");
      }
      const auto type = parse_scalar_type(type_token);
      std::string name;
      ls >> name;
      if (!type || name.empty()) {
        throw PlyError(PlyErrorKind::MalformedHeader, line_offset, "malformed property line");
      }
      const int idx = static_cast<int>(layout.properties.size());
      if (name == "x" || name == "y" || name == "z") {
        if (*type != ScalarType::Float && *type != ScalarType::Double) {
          throw PlyError(PlyErrorKind::UnsupportedProperty, line_offset,
                         "coordinate property must be float32 or float64");
        }
        (name == "x" ? layout.ix : name == "y" ? layout.iy : layout.iz) = idx;
      } else if (name == "red" || name == "green" || name == "blue") {
        if (*type != ScalarType::UChar) {
          throw PlyError(PlyErrorKind::UnsupportedProperty, line_offset,
                         "color property must be uchar");
        }
        (name == "red" ? layout.ired : name == "green" ? layout.igreen : layout.iblue) = idx;
      } else if (name == "time") {
        if (*type != ScalarType::Double) {
          throw PlyError(PlyErrorKind::UnsupportedProperty, line_offset,
                         "time property must be float64");
        }
        layout.itime = idx;
      }
      layout.properties.push_back(Property{name, *type});
    } else if (keyword == "end_header") {
      break;
    } else {
      throw PlyError(PlyErrorKind::MalformedHeader, line_offset,
                     "unknown header keyword '" + keyword + "'");
    }
  }

  if (!have_format) {
    throw PlyError(PlyErrorKind::MalformedHeader, offset, "header missing format line");
  }
  if (!seen_vertex_element) {
    throw PlyError(PlyErrorKind::MalformedHeader, offset, "header missing vertex element");
  }
  if (vertex_count > 0 && (layout.ix < 0 || layout.iy < 0 || layout.iz < 0)) {
    throw PlyError(PlyErrorKind::MalformedHeader, offset, "vertex element missing x/y/z");
  }
  const bool has_color = layout.ired >= 0 && layout.igreen >= 0 && layout.iblue >= 0;

  PlyData data;
  data.cloud.points.reserve(vertex_count);
  if (layout.itime >= 0) data.cloud.times.reserve(vertex_count);
  if (has_color) data.colors.reserve(vertex_count);

  const std::size_t n_props = layout.properties.size();
  std::vector<double> row(n_props, 0.0);

  if (binary) {
    std::size_t stride = 0;
    std::vector<std::size_t> prop_offsets(n_props);
    for (std::size_t p = 0; p < n_props; ++p) {
      prop_offsets[p] = stride;
      stride += scalar_size(layout.properties[p].type);
    }
    std::vector<char> buffer(stride);
    for (std::size_t v = 0; v < vertex_count; ++v) {
      in.read(buffer.data(), static_cast<std::streamsize>(stride));
      if (static_cast<std::size_t>(in.gcount()) != stride) {
        throw PlyError(PlyErrorKind::TruncatedBody, offset + static_cast<std::size_t>(in.gcount()),
                       "vertex data ends after " + std::to_string(v) + " of " +
                           std::to_string(vertex_count) + " vertices");
      }
      for (std::size_t p = 0; p < n_props; ++p) {
        row[p] = decode_scalar(
            reinterpret_cast<const unsigned char*>(buffer.data()) + prop_offsets[p],
            layout.properties[p].type);
      }
      offset += stride;
      data.cloud.points.emplace_back(row[layout.ix], row[layout.iy], row[layout.iz]);
      if (layout.itime >= 0) data.cloud.times.push_back(row[layout.itime]);
      if (has_color) {
        data.colors.push_back(Color{static_cast<std::uint8_t>(row[layout.ired]),
                                    static_cast<std::uint8_t>(row[layout.igreen]),
                                    static_cast<std::uint8_t>(row[layout.iblue])});
      }
    }
  } else {
    for (std::size_t v = 0; v < vertex_count; ++v) {
      for (std::size_t p = 0; p < n_props; ++p) {
        const std::streampos pos = in.tellg();
        const std::size_t at = pos >= 0 ? static_cast<std::size_t>(pos) : offset;
        std::string token;
        if (!(in >> token)) {
          throw PlyError(PlyErrorKind::TruncatedBody, at,
                         "vertex data ends after " + std::to_string(v) + " of " +
                             std::to_string(vertex_count) + " vertices");
        }
        char* end = nullptr;
        row[p] = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0') {
          throw PlyError(PlyErrorKind::TruncatedBody, at,
                         "non-numeric vertex token '" + token + "'");
        }
      }
      data.cloud.points.emplace_back(row[layout.ix], row[layout.iy], row[layout.iz]);
      if (layout.itime >= 0) data.cloud.times.push_back(row[layout.itime]);
      if (has_color) {
        data.colors.push_back(Color{static_cast<std::uint8_t>(row[layout.ired]),
                                    static_cast<std::uint8_t>(row[layout.igreen]),
                                    static_cast<std::uint8_t>(row[layout.iblue])});
      }
    }
  }
  return data;
}

namespace {

void append_double_le(std::string& out, double v) {
  char bytes[8];
  std::memcpy(bytes, &v, 8);
  out.append(bytes, 8);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_ply(const PlyData& data, const std::filesystem::path& path,
               const PlyWriteOptions& options) {
  const std::size_t n = data.cloud.size();
  const bool with_time = data.cloud.has_times();
  const bool with_color = data.has_colors();
  if (with_time && data.cloud.times.size() != n) {
    throw std::invalid_argument("write_ply: times length mismatch");
  }
  if (with_color && data.colors.size() != n) {
    throw std::invalid_argument("write_ply: colors length mismatch");
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw PlyError(PlyErrorKind::Io, 0, "cannot write " + path.string());

  out << "ply\n";
  out << (options.ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n");
  out << "element vertex " << n << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (with_color) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (with_time) out << "property double time\n";
  out << "end_header\n";

  if (options.ascii) {
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& p = data.cloud.points[i];
      out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z());
      if (with_color) {
        out << ' ' << static_cast<int>(data.colors[i][0]) << ' '
            << static_cast<int>(data.colors[i][1]) << ' ' << static_cast<int>(data.colors[i][2]);
      }
      if (with_time) out << ' ' << format_double(data.cloud.times[i]);
      out << '\n';
    }
  } else {
    std::string buffer;
    buffer.reserve(n * (24 + (with_color ? 3 : 0) + (with_time ? 8 : 0)));
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& p = data.cloud.points[i];
      append_double_le(buffer, p.x());
      append_double_le(buffer, p.y());
      append_double_le(buffer, p.z());
      if (with_color) {
        buffer.push_back(static_cast<char>(data.colors[i][0]));
        buffer.push_back(static_cast<char>(data.colors[i][1]));
        buffer.push_back(static_cast<char>(data.colors[i][2]));
      }
      if (with_time) append_double_le(buffer, data.cloud.times[i]);
    }
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  }
  if (!out) throw PlyError(PlyErrorKind::Io, 0, "write failed for " + path.string());
}

void write_ply(const PointCloud& cloud, const std::filesystem::path& path,
               const PlyWriteOptions& options) {
  PlyData data;
  data.cloud = cloud;
  write_ply(data, path, options);
}

void write_ply(const ColoredPointCloud& cloud, const std::filesystem::path& path,
               const PlyWriteOptions& options) {
  PlyData data;
  data.cloud.points = cloud.points;
  data.colors = cloud.colors;
  write_ply(data, path, options);
}

}  // namespace orchard::io
