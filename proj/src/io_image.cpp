#include "orchard/io/image_io.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

namespace orchard::io {

namespace {

// Next whitespace-separated token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  while (in >> token) {
    if (token[0] != '#') return token;
    std::string rest;
    std::getline(in, rest);
  }
  throw std::runtime_error("ppm: unexpected end of header");
}

}  // namespace

CameraFrame read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  if (next_token(in) != "P6") throw std::runtime_error(path.string() + ": not a P6 PPM");
  CameraFrame frame;
  frame.width = std::stoi(next_token(in));
  frame.height = std::stoi(next_token(in));
  const int maxval = std::stoi(next_token(in));
  if (frame.width <= 0 || frame.height <= 0 || maxval != 255) {
    throw std::runtime_error(path.string() + ": unsupported PPM dimensions or maxval");
  }
  in.get();  // the single whitespace after maxval

  const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
  std::vector<char> raw(n * 3);
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw std::runtime_error(path.string() + ": truncated pixel data");
  }
  frame.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    frame.pixels[i] = Color{static_cast<std::uint8_t>(raw[3 * i]),
                            static_cast<std::uint8_t>(raw[3 * i + 1]),
                            static_cast<std::uint8_t>(raw[3 * i + 2])};
  }
  return frame;
}

void write_ppm(const CameraFrame& frame, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P6\n" << frame.width << ' ' << frame.height << "\n255\n";
  std::vector<char> raw;
  raw.reserve(frame.pixels.size() * 3);
  for (const Color& c : frame.pixels) {
    raw.push_back(static_cast<char>(c[0]));
    raw.push_back(static_cast<char>(c[1]));
    raw.push_back(static_cast<char>(c[2]));
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace orchard::io
