#pragma once

#include <functional>
#include <vector>

#include "orchard/lio/filter.hpp"

namespace orchard::lio {

// One LiDAR sweep in the sensor frame with absolute per-point timestamps.
struct ScanRecord {
  double t_start = 0.0;
  double t_end = 0.0;
  PointCloud cloud;
};

struct OdometryInput {
  std::vector<ImuSample> imu;
  std::vector<ScanRecord> scans;
  PoseSE3 imu_from_lidar;  // maps LiDAR-frame points into the body frame

  // Optional gauge seed: the filter anchors position and yaw here instead of
  // the origin. Roll and pitch always come from the gravity direction.
  PoseSE3 initial_gauge;
};

struct OdometryReport {
  int scans_processed = 0;
  int scans_skipped = 0;     // before initialization finished, or empty
  int degenerate_scans = 0;  // propagated without update
  std::vector<UpdateReport> updates;
};

struct OdometryResult {
  std::vector<TimedPose> trajectory;  // one body pose per processed scan end
  MapStore map;
  OdometryReport report;

  OdometryResult() : map(0.05) {}
};

// Called after every propagation step and every measurement update; used by
// verification suites to inspect filter numerics as the run progresses.
using StepObserver =
    std::function<void(const char* phase, double t, const NavState&, const StateCovariance&)>;

// Full pipeline: orientation init from the first init_window seconds of
// accelerometer data, then propagate -> deskew -> iterated update ->
// map insert per scan. IMU/scan time gaps over max_time_gap abort with
// "log gap"; a log without scans is an error.
OdometryResult run_odometry(const OdometryInput& input, const OdometryConfig& config,
                            const StepObserver& observer = nullptr);

}  // namespace orchard::lio
