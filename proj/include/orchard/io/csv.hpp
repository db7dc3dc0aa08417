#pragma once

#include <filesystem>
#include <vector>

#include "orchard/geometry.hpp"
#include "orchard/imu_types.hpp"

namespace orchard::io {

// IMU CSV with the exact header "t,wx,wy,wz,ax,ay,az", SI units. NaN/Inf
// values and non-monotone timestamps are rejected with the offending line
// number.
std::vector<ImuSample> read_imu_csv(const std::filesystem::path& path);
void write_imu_csv(const std::vector<ImuSample>& samples, const std::filesystem::path& path);

// Trajectory CSV, header "t,x,y,z,qw,qx,qy,qz". Quaternions are normalized
// on read.
std::vector<TimedPose> read_trajectory_csv(const std::filesystem::path& path);
void write_trajectory_csv(const std::vector<TimedPose>& trajectory,
                          const std::filesystem::path& path);

// Frame index CSV, header "t,path"; paths are relative to the CSV location.
struct FrameIndexEntry {
  double t = 0.0;
  std::string path;
};
std::vector<FrameIndexEntry> read_frame_index_csv(const std::filesystem::path& path);
void write_frame_index_csv(const std::vector<FrameIndexEntry>& entries,
                           const std::filesystem::path& path);

}  // namespace orchard::io
