#include "orchard/io/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace orchard::io {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_field(const std::string& token, const std::filesystem::path& path, int line_no) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    throw std::runtime_error(path.string() + ": non-numeric value '" + token + "' at line " +
                             std::to_string(line_no));
  }
  if (!std::isfinite(v)) {
    throw std::runtime_error(path.string() + ": non-finite value at line " +
                             std::to_string(line_no));
  }
  return v;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::vector<ImuSample> read_imu_csv(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "t,wx,wy,wz,ax,ay,az") {
    throw std::runtime_error(path.string() + ": expected header 't,wx,wy,wz,ax,ay,az'");
  }
  std::vector<ImuSample> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 7) {
      throw std::runtime_error(path.string() + ": expected 7 fields at line " +
                               std::to_string(line_no));
    }
    ImuSample s;
    s.t = parse_field(fields[0], path, line_no);
    for (int k = 0; k < 3; ++k) s.gyro[k] = parse_field(fields[1 + k], path, line_no);
    for (int k = 0; k < 3; ++k) s.accel[k] = parse_field(fields[4 + k], path, line_no);
    if (!out.empty() && !(s.t > out.back().t)) {
      throw std::runtime_error(path.string() + ": non-increasing timestamp at line " +
                               std::to_string(line_no));
    }
    out.push_back(s);
  }
  return out;
}

void write_imu_csv(const std::vector<ImuSample>& samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t,wx,wy,wz,ax,ay,az\n";
  for (const ImuSample& s : samples) {
    out << format_double(s.t);
    for (int k = 0; k < 3; ++k) out << ',' << format_double(s.gyro[k]);
    for (int k = 0; k < 3; ++k) out << ',' << format_double(s.accel[k]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<TimedPose> read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "t,x,y,z,qw,qx,qy,qz") {
    throw std::runtime_error(path.string() + ": expected header 't,x,y,z,qw,qx,qy,qz'");
  }
  std::vector<TimedPose> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 8) {
      throw std::runtime_error(path.string() + ": expected 8 fields at line " +
                               std::to_string(line_no));
    }
    double v[8];
    for (int k = 0; k < 8; ++k) v[k] = parse_field(fields[k], path, line_no);
    TimedPose tp;
    tp.t = v[0];
    tp.pose.translation = Vec3(v[1], v[2], v[3]);
    tp.pose.rotation = Rotation(v[4], v[5], v[6], v[7]);
    if (!out.empty() && !(tp.t > out.back().t)) {
      throw std::runtime_error(path.string() + ": non-increasing timestamp at line " +
                               std::to_string(line_no));
    }
    out.push_back(tp);
  }
  return out;
}

void write_trajectory_csv(const std::vector<TimedPose>& trajectory,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t,x,y,z,qw,qx,qy,qz\n";
  for (const TimedPose& tp : trajectory) {
    const Rotation& q = tp.pose.rotation;
    out << format_double(tp.t) << ',' << format_double(tp.pose.translation.x()) << ','
        << format_double(tp.pose.translation.y()) << ',' << format_double(tp.pose.translation.z())
        << ',' << format_double(q.w()) << ',' << format_double(q.x()) << ','
        << format_double(q.y()) << ',' << format_double(q.z()) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<FrameIndexEntry> read_frame_index_csv(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "t,path") {
    throw std::runtime_error(path.string() + ": expected header 't,path'");
  }
  std::vector<FrameIndexEntry> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error(path.string() + ": expected 2 fields at line " +
                               std::to_string(line_no));
    }
    FrameIndexEntry e;
    e.t = parse_field(line.substr(0, comma), path, line_no);
    e.path = line.substr(comma + 1);
    if (e.path.empty()) {
      throw std::runtime_error(path.string() + ": empty path at line " + std::to_string(line_no));
    }
    if (!out.empty() && !(e.t > out.back().t)) {
      throw std::runtime_error(path.string() + ": non-increasing timestamp at line " +
                               std::to_string(line_no));
    }
    out.push_back(e);
  }
  return out;
}

void write_frame_index_csv(const std::vector<FrameIndexEntry>& entries,
                           const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t,path\n";
  for (const auto& e : entries) out << format_double(e.t) << ',' << e.path << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace orchard::io
