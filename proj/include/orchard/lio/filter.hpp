#pragma once

#include <vector>

#include "orchard/imu_types.hpp"
#include "orchard/lio/map_store.hpp"
#include "orchard/lio/types.hpp"

namespace orchard::lio {

// One IMU integration step (zero-order hold over dt). First-order
// on-manifold discretization; covariance by F P F^T + Q with noise densities
// from the config. Requires 0 < dt < 0.1 s; non-finite samples raise
// "corrupt IMU sample".
void propagate(NavState& state, StateCovariance& cov, const ImuSample& imu, double dt,
               const OdometryConfig& config);

// Integrates between two consecutive samples with the trapezoid-averaged
// measurement, which keeps zero-noise double integration second-order
// accurate. dt comes from the sample timestamps.
void propagate_between(NavState& state, StateCovariance& cov, const ImuSample& a,
                       const ImuSample& b, const OdometryConfig& config);

struct PlaneFit {
  Vec3 normal{0, 0, 1};  // unit; sign canonical (largest component positive)
  double offset = 0.0;   // plane is {x : normal . x = offset}
  bool valid = false;
};

// Least-squares plane through the k nearest map points. Valid only when the
// map holds at least k points and every neighbor lies within
// validity_threshold of the plane.
PlaneFit fit_local_plane(const MapStore& map, const Vec3& point, int k,
                         double validity_threshold);

// Re-expresses every point in the body frame at the last pose's timestamp
// using the interpolated pose at each point's capture time. Poses are
// body->world over the sweep. Throws when timestamps are missing and deskew
// is requested.
PointCloud deskew_scan(const PointCloud& scan, const std::vector<TimedPose>& sweep_poses,
                       bool enabled = true);

struct UpdateReport {
  int iterations = 0;
  std::size_t scan_points = 0;
  std::size_t valid_matches = 0;          // at the final linearization
  std::vector<double> residual_rms;       // one entry per iteration, pre-step
  bool converged = false;
};

// Iterated error-state update with point-to-plane residuals (Gauss-Newton
// form on the error state). The scan is in the body frame; associations are
// rebuilt each iteration. Throws "degenerate scan" when no point yields a
// valid plane, leaving state and covariance untouched.
UpdateReport iterated_update(NavState& state, StateCovariance& cov, const PointCloud& scan,
                             const MapStore& map, const OdometryConfig& config);

}  // namespace orchard::lio
