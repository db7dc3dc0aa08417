#include "orchard/lio/odometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace orchard::lio {

namespace {

constexpr double kMaxStep = 0.05;  // s, propagation substep bound

// Integrates a (possibly long) interval with a fixed measurement, split into
// substeps that respect propagate's dt bound.
void propagate_span(NavState& state, StateCovariance& cov, const ImuSample& meas,
                    double t_from, double t_to, const OdometryConfig& config) {
  double t = t_from;
  while (t < t_to - 1e-12) {
    const double dt = std::min(kMaxStep, t_to - t);
    ImuSample m = meas;
    m.t = t;
    propagate(state, cov, m, dt, config);
    t += dt;
  }
}

}  // namespace

OdometryResult run_odometry(const OdometryInput& input, const OdometryConfig& config,
                            const StepObserver& observer) {
  config.validate();
  if (input.imu.empty()) throw std::runtime_error("odometry: log has no IMU samples");
  if (input.scans.empty()) throw std::runtime_error("odometry: log has no scans");
  for (std::size_t i = 0; i < input.imu.size(); ++i) {
    if (!input.imu[i].finite()) throw std::invalid_argument("corrupt IMU sample");
    if (i > 0 && !(input.imu[i].t > input.imu[i - 1].t)) {
      throw std::runtime_error("odometry: IMU timestamps not strictly increasing");
    }
    if (i > 0 && input.imu[i].t - input.imu[i - 1].t > config.max_time_gap) {
      throw std::runtime_error("log gap");
    }
  }
  for (std::size_t i = 1; i < input.scans.size(); ++i) {
    if (!(input.scans[i].t_end > input.scans[i - 1].t_end)) {
      throw std::runtime_error("odometry: scans not ordered by end time");
    }
  }

  // Orientation init: mean specific force over the first init_window seconds
  // gives the gravity direction; yaw and position come from the gauge seed.
  const double t0 = input.imu.front().t;
  Vec3 mean_accel = Vec3::Zero();
  std::size_t init_count = 0;
  while (init_count < input.imu.size() &&
         input.imu[init_count].t <= t0 + config.init_window) {
    mean_accel += input.imu[init_count].accel;
    ++init_count;
  }
  mean_accel /= static_cast<double>(init_count);
  if (mean_accel.norm() < 1.0) {
    throw std::runtime_error("odometry: accelerometer magnitude too small for gravity init");
  }

  NavState state;
  state.orientation =
      input.initial_gauge.rotation * Rotation::from_two_vectors(mean_accel, Vec3(0, 0, 1));
  state.position = input.initial_gauge.translation;
  state.gravity = Vec3(0, 0, -config.gravity_magnitude);

  StateCovariance cov = StateCovariance::Zero();
  cov.diagonal().segment<3>(kIdxTheta).setConstant(config.init_cov_orientation);
  cov.diagonal().segment<3>(kIdxPos).setConstant(config.init_cov_position);
  cov.diagonal().segment<3>(kIdxVel).setConstant(config.init_cov_velocity);
  cov.diagonal().segment<3>(kIdxBg).setConstant(config.init_cov_gyro_bias);
  cov.diagonal().segment<3>(kIdxBa).setConstant(config.init_cov_accel_bias);
  cov.diagonal().segment<3>(kIdxGrav).setConstant(
      config.estimate_gravity ? config.init_cov_gravity : 1e-9);

  OdometryResult result;
  result.map = MapStore(config.map_resolution);

  ImuSample prev = input.imu[init_count - 1];
  std::size_t imu_idx = init_count;
  double filter_time = prev.t;

  std::vector<TimedPose> sweep;
  for (const ScanRecord& scan : input.scans) {
    if (scan.t_end <= filter_time || scan.cloud.empty()) {
      ++result.report.scans_skipped;
      continue;
    }

    sweep.clear();
    sweep.push_back(TimedPose{filter_time, state.pose()});
    while (imu_idx < input.imu.size() && input.imu[imu_idx].t <= scan.t_end) {
      const ImuSample& next = input.imu[imu_idx];
      propagate_between(state, cov, prev, next, config);
      filter_time = next.t;
      sweep.push_back(TimedPose{filter_time, state.pose()});
      if (observer) observer("propagate", filter_time, state, cov);
      prev = next;
      ++imu_idx;
    }
    if (scan.t_end > filter_time) {
      if (scan.t_end - filter_time > config.max_time_gap) throw std::runtime_error("log gap");
      propagate_span(state, cov, prev, filter_time, scan.t_end, config);
      filter_time = scan.t_end;
      sweep.push_back(TimedPose{filter_time, state.pose()});
      if (observer) observer("propagate", filter_time, state, cov);
    }

    const PointCloud body_scan = transform_points(input.imu_from_lidar, scan.cloud);
    const PointCloud aligned = deskew_scan(body_scan, sweep, config.deskew);

    if (result.map.empty()) {
      result.map.insert(transform_points(state.pose(), aligned));
      result.trajectory.push_back(TimedPose{scan.t_end, state.pose()});
      ++result.report.scans_processed;
      continue;
    }

    try {
      UpdateReport rep = iterated_update(state, cov, aligned, result.map, config);
      result.report.updates.push_back(std::move(rep));
      if (observer) observer("update", filter_time, state, cov);
    } catch (const std::runtime_error& e) {
      if (std::string(e.what()) != "degenerate scan") throw;
      ++result.report.degenerate_scans;  // keep the propagated state
    }
    result.map.insert(transform_points(state.pose(), aligned));
    result.trajectory.push_back(TimedPose{scan.t_end, state.pose()});
    ++result.report.scans_processed;
  }

  if (result.trajectory.empty()) {
    throw std::runtime_error("odometry: no scan fell inside the IMU time span");
  }
  return result;
}

}  // namespace orchard::lio
