#include "orchard/lio/filter.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace orchard::lio {

namespace {

void symmetrize(StateCovariance& P) { P = 0.5 * (P + P.transpose()).eval(); }

}  // namespace

void OdometryConfig::validate() const {
  if (!(convergence_threshold > 0.0) || !(plane_validity_threshold > 0.0) ||
      !(map_resolution > 0.0) || !(measurement_sigma > 0.0) || !(max_time_gap > 0.0) ||
      !(init_window > 0.0) || !(max_residual > 0.0) || max_iterations < 1) {
    throw std::invalid_argument("odometry config: thresholds must be positive");
  }
  if (plane_neighbors < 3) throw std::invalid_argument("odometry config: plane_neighbors >= 3");
}

void propagate(NavState& state, StateCovariance& cov, const ImuSample& imu, double dt,
               const OdometryConfig& config) {
  if (!imu.finite()) throw std::invalid_argument("corrupt IMU sample");
  if (!(dt > 0.0) || !(dt < 0.1)) {
    throw std::invalid_argument("propagate: dt must lie in (0, 0.1) s");
  }

  const Vec3 omega = imu.gyro - state.gyro_bias;
  const Vec3 accel_body = imu.accel - state.accel_bias;
  const Mat3 R = state.orientation.matrix();

  // Nominal kinematics. The midpoint orientation rotates the specific force
  // (second order in dt); the half-dt^2 term keeps constant-force motion
  // exact.
  const Mat3 R_mid = (state.orientation * Rotation::exp(0.5 * omega * dt)).matrix();
  const Vec3 accel_world = R_mid * accel_body + state.gravity;
  state.position += state.velocity * dt + 0.5 * accel_world * dt * dt;
  state.velocity += accel_world * dt;
  state.orientation = state.orientation * Rotation::exp(omega * dt);

  // Error-state transition, order (dtheta, dp, dv, dbg, dba, dg).
  StateCovariance F = StateCovariance::Identity();
  F.block<3, 3>(kIdxTheta, kIdxTheta) = Rotation::exp(omega * dt).matrix().transpose();
  F.block<3, 3>(kIdxTheta, kIdxBg) = -Mat3::Identity() * dt;
  F.block<3, 3>(kIdxPos, kIdxVel) = Mat3::Identity() * dt;
  F.block<3, 3>(kIdxVel, kIdxTheta) = -R * skew(accel_body) * dt;
  F.block<3, 3>(kIdxVel, kIdxBa) = -R * dt;
  F.block<3, 3>(kIdxVel, kIdxGrav) = Mat3::Identity() * dt;

  // Continuous noise densities to discrete covariance over dt. Gravity is
  // constant; position noise enters through velocity.
  StateCovariance Q = StateCovariance::Zero();
  Q.diagonal().segment<3>(kIdxTheta).setConstant(config.gyro_noise_density *
                                                 config.gyro_noise_density * dt);
  Q.diagonal().segment<3>(kIdxVel).setConstant(config.accel_noise_density *
                                               config.accel_noise_density * dt);
  Q.diagonal().segment<3>(kIdxBg).setConstant(config.gyro_bias_rw_density *
                                              config.gyro_bias_rw_density * dt);
  Q.diagonal().segment<3>(kIdxBa).setConstant(config.accel_bias_rw_density *
                                              config.accel_bias_rw_density * dt);

  cov = F * cov * F.transpose() + Q;
  symmetrize(cov);
}

void propagate_between(NavState& state, StateCovariance& cov, const ImuSample& a,
                       const ImuSample& b, const OdometryConfig& config) {
  const double dt = b.t - a.t;
  ImuSample mid;
  mid.t = a.t;
  mid.gyro = 0.5 * (a.gyro + b.gyro);
  mid.accel = 0.5 * (a.accel + b.accel);
  propagate(state, cov, mid, dt, config);
}

PlaneFit fit_local_plane(const MapStore& map, const Vec3& point, int k,
                         double validity_threshold) {
  PlaneFit fit;
  if (k < 3) throw std::invalid_argument("fit_local_plane: k must be >= 3");
  if (map.size() < static_cast<std::size_t>(k)) return fit;  // invalid, not an error

  const auto neighbors = map.knn(point, static_cast<std::size_t>(k));
  Vec3 centroid = Vec3::Zero();
  for (const auto& n : neighbors) centroid += map.point(n.index);
  centroid /= static_cast<double>(neighbors.size());

  Mat3 scatter = Mat3::Zero();
  for (const auto& n : neighbors) {
    const Vec3 d = map.point(n.index) - centroid;
    scatter += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  Vec3 normal = eig.eigenvectors().col(0);  // smallest eigenvalue

  // Canonical sign: largest-magnitude component positive.
  int max_axis = 0;
  normal.cwiseAbs().maxCoeff(&max_axis);
  if (normal[max_axis] < 0.0) normal = -normal;

  const double offset = normal.dot(centroid);
  for (const auto& n : neighbors) {
    if (std::abs(normal.dot(map.point(n.index)) - offset) >= validity_threshold) {
      return fit;  // scattered neighbors: reject
    }
  }
  fit.normal = normal;
  fit.offset = offset;
  fit.valid = true;
  return fit;
}

PointCloud deskew_scan(const PointCloud& scan, const std::vector<TimedPose>& sweep_poses,
                       bool enabled) {
  if (!enabled) return scan;
  if (scan.empty()) return scan;
  if (!scan.has_times()) throw std::invalid_argument("deskew_scan: missing point timestamps");
  if (sweep_poses.empty()) throw std::invalid_argument("deskew_scan: empty pose sequence");

  const PoseSE3 end_inv = sweep_poses.back().pose.inverse();
  PointCloud out;
  out.frame = scan.frame;
  out.times = scan.times;
  out.points.reserve(scan.size());
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const PoseSE3 at_capture = interpolate_pose(sweep_poses, scan.times[i]);
    out.points.push_back(end_inv * (at_capture * scan.points[i]));
  }
  return out;
}

UpdateReport iterated_update(NavState& state, StateCovariance& cov, const PointCloud& scan,
                             const MapStore& map, const OdometryConfig& config) {
  config.validate();
  if (map.empty()) throw std::runtime_error("iterated_update: empty map");

  using Mat6 = Eigen::Matrix<double, 6, 6>;
  using Vec6 = Eigen::Matrix<double, 6, 1>;
  const double inv_r = 1.0 / (config.measurement_sigma * config.measurement_sigma);

  const NavState prior = state;
  const StateCovariance P = cov;
  const StateCovariance P_inv = P.ldlt().solve(StateCovariance::Identity());

  UpdateReport report;
  report.scan_points = scan.size();

  NavState current = prior;
  ErrorVector delta = ErrorVector::Zero();

  // Builds the stacked normal equations at the given state; returns false
  // when no point produces a valid plane association.
  const auto accumulate = [&](const NavState& at, Mat6& A, Vec6& g, double& rss,
                              std::size_t& matches) {
    A.setZero();
    g.setZero();
    rss = 0.0;
    matches = 0;
    const Mat3 R = at.orientation.matrix();
    for (const Vec3& p_body : scan.points) {
      const Vec3 p_world = R * p_body + at.position;
      const PlaneFit plane = fit_local_plane(map, p_world, config.plane_neighbors,
                                             config.plane_validity_threshold);
      if (!plane.valid) continue;
      const double z = plane.normal.dot(p_world) - plane.offset;
      if (std::abs(z) >= config.max_residual) continue;
      Vec6 h;
      h.head<3>() = -(plane.normal.transpose() * R * skew(p_body)).transpose();
      h.tail<3>() = plane.normal;
      A.noalias() += h * h.transpose();
      g.noalias() += h * z;
      rss += z * z;
      ++matches;
    }
    return matches > 0;
  };

  Mat6 A;
  Vec6 g;
  double rss = 0.0;
  std::size_t matches = 0;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    if (!accumulate(current, A, g, rss, matches)) {
      if (iter == 0) throw std::runtime_error("degenerate scan");
      break;
    }
    report.residual_rms.push_back(std::sqrt(rss / static_cast<double>(matches)));
    ++report.iterations;

    // Gauss-Newton step on the error state about the prior:
    //   (H^T H / r + P^-1) d+ = H^T (H d - z) / r
    StateCovariance S = P_inv;
    S.block<6, 6>(0, 0) += A * inv_r;
    ErrorVector rhs = ErrorVector::Zero();
    rhs.head<6>() = (A * delta.head<6>() - g) * inv_r;
    const ErrorVector delta_new = S.ldlt().solve(rhs);

    const double step = (delta_new - delta).lpNorm<Eigen::Infinity>();
    delta = delta_new;

    current = prior;
    current.orientation = prior.orientation * Rotation::exp(delta.segment<3>(kIdxTheta));
    current.position = prior.position + delta.segment<3>(kIdxPos);
    current.velocity = prior.velocity + delta.segment<3>(kIdxVel);
    current.gyro_bias = prior.gyro_bias + delta.segment<3>(kIdxBg);
    current.accel_bias = prior.accel_bias + delta.segment<3>(kIdxBa);
    current.gravity = prior.gravity + delta.segment<3>(kIdxGrav);

    if (step < config.convergence_threshold) {
      report.converged = true;
      break;
    }
  }

  // Covariance at the final linearization point.
  if (!accumulate(current, A, g, rss, matches)) throw std::runtime_error("degenerate scan");
  report.valid_matches = matches;
  StateCovariance S = P_inv;
  S.block<6, 6>(0, 0) += A * inv_r;
  StateCovariance post = S.ldlt().solve(StateCovariance::Identity());

  // Error reset: fold the injected attitude error into the covariance.
  StateCovariance G = StateCovariance::Identity();
  G.block<3, 3>(kIdxTheta, kIdxTheta) = Mat3::Identity() - skew(0.5 * delta.segment<3>(kIdxTheta));
  post = G * post * G.transpose();
  symmetrize(post);

  state = current;
  cov = post;
  return report;
}

}  // namespace orchard::lio
