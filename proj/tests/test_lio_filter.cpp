#include <doctest.h>

#include <Eigen/Dense>

#include <random>

#include "orchard/lio/filter.hpp"

using namespace orchard;
using namespace orchard::lio;

namespace {

OdometryConfig tight_config() {
  OdometryConfig c;
  c.measurement_sigma = 0.001;
  c.max_iterations = 8;
  c.convergence_threshold = 1e-8;
  return c;
}

// Dense samples of three orthogonal planes around the origin.
MapStore three_plane_map(double extent = 2.0, double step = 0.05) {
  MapStore map(step * 0.5);
  std::vector<Vec3> pts;
  for (double a = -extent; a <= extent; a += step) {
    for (double b = -extent; b <= extent; b += step) {
      pts.emplace_back(a, b, 0.0);        // z = 0
      pts.emplace_back(a, 0.0 + extent, b);  // y = extent wall
      pts.emplace_back(0.0 - extent, a, b);  // x = -extent wall
    }
  }
  map.insert(pts);
  return map;
}

// Exact surface points seen from a body at `pose`: world samples pulled back
// into the body frame.
PointCloud pullback_scan(const MapStore& map, const PoseSE3& pose, std::size_t stride = 7) {
  PointCloud scan;
  const PoseSE3 inv = pose.inverse();
  for (std::size_t i = 0; i < map.size(); i += stride) scan.points.push_back(inv * map.point(i));
  return scan;
}

ImuSample stationary_sample(double t = 0.0) {
  ImuSample s;
  s.t = t;
  s.accel = Vec3(0, 0, 9.81);
  return s;
}

}  // namespace

TEST_CASE("propagate identity and statics") {
  const OdometryConfig config;

  SUBCASE("dt -> 0 leaves the state unchanged") {
    NavState state;
    state.velocity = Vec3(0.5, -0.2, 0.1);
    StateCovariance cov = StateCovariance::Identity() * 1e-4;
    const NavState before = state;
    propagate(state, cov, stationary_sample(), 1e-12, config);
    CHECK((state.position - before.position).norm() < 1e-9);
    CHECK((state.velocity - before.velocity).norm() < 1e-12);
    CHECK(state.orientation.angle_to(before.orientation) < 1e-12);
  }

  SUBCASE("stationary input leaves state fixed and grows covariance") {
    NavState state;
    StateCovariance cov = StateCovariance::Identity() * 1e-6;
    const StateCovariance cov0 = cov;
    for (int i = 0; i < 100; ++i) propagate(state, cov, stationary_sample(), 0.005, config);
    CHECK(state.position.norm() < 1e-12);
    CHECK(state.velocity.norm() < 1e-12);
    CHECK(state.orientation.angle_to(Rotation::identity()) < 1e-12);
    CHECK(cov.trace() > cov0.trace());
  }

  SUBCASE("constant specific force from rest gives half (f+g) T^2") {
    NavState state;
    StateCovariance cov = StateCovariance::Identity() * 1e-6;
    ImuSample s = stationary_sample();
    s.accel = Vec3(1.0, 0.0, 9.81);  // net world accel (1, 0, 0)
    const double dt = 0.001, T = 1.0;
    for (int i = 0; i < static_cast<int>(T / dt); ++i) propagate(state, cov, s, dt, config);
    CHECK((state.position - Vec3(0.5, 0.0, 0.0)).norm() < 1e-6);
    CHECK((state.velocity - Vec3(1.0, 0.0, 0.0)).norm() < 1e-6);
  }

  SUBCASE("corrupt IMU raises") {
    NavState state;
    StateCovariance cov = StateCovariance::Identity();
    ImuSample bad = stationary_sample();
    bad.accel.x() = std::nan("");
    CHECK_THROWS_WITH(propagate(state, cov, bad, 0.01, config), "corrupt IMU sample");
  }
}

TEST_CASE("covariance stays symmetric PSD under propagation") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  NavState state;
  StateCovariance cov = StateCovariance::Identity() * 1e-2;
  const OdometryConfig config;
  for (int i = 0; i < 500; ++i) {
    ImuSample s;
    s.t = i * 0.005;
    s.gyro = Vec3(n(rng), n(rng), n(rng)) * 0.3;
    s.accel = Vec3(n(rng), n(rng), n(rng)) * 0.5 + Vec3(0, 0, 9.81);
    propagate(state, cov, s, 0.005, config);
    CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    const Eigen::SelfAdjointEigenSolver<StateCovariance> eig(cov);
    CHECK(eig.eigenvalues().minCoeff() > -1e-9);
  }
}

TEST_CASE("fit_local_plane") {
  SUBCASE("coplanar points give the exact plane") {
    MapStore map(0.01);
    map.insert(std::vector<Vec3>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.5, 0}});
    const PlaneFit fit = fit_local_plane(map, Vec3(0.5, 0.5, 0.1), 5, 0.1);
    REQUIRE(fit.valid);
    CHECK(std::abs(std::abs(fit.normal.z()) - 1.0) < 1e-12);
    CHECK(std::abs(fit.offset) < 1e-12);
  }

  SUBCASE("sphere patch normal points along the radius") {
    // Patch of a 5 m sphere around (5,0,0): locally planar well inside the
    // validity threshold; the least-squares normal matches the radial
    // direction.
    MapStore map(0.001);
    std::vector<Vec3> pts;
    const double R = 5.0;
    for (int i = -2; i <= 2; ++i) {
      for (int j = -2; j <= 2; ++j) {
        const double y = 0.01 * i, z = 0.01 * j;
        pts.emplace_back(std::sqrt(R * R - y * y - z * z), y, z);
      }
    }
    MapStore patch(0.001);
    patch.insert(pts);
    const PlaneFit fit = fit_local_plane(patch, Vec3(R, 0, 0), 9, 0.1);
    REQUIRE(fit.valid);
    CHECK(std::abs(std::abs(fit.normal.x()) - 1.0) < 1e-4);
  }

  SUBCASE("scattered neighbors beyond the threshold are invalid") {
    MapStore map(0.01);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec3> pts;
    for (int i = 0; i < 30; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
    map.insert(pts);
    const PlaneFit fit = fit_local_plane(map, Vec3(0, 0, 0), 8, 0.05);
    CHECK_FALSE(fit.valid);
  }

  SUBCASE("fewer than k neighbors is invalid, not an error") {
    MapStore map(0.01);
    map.insert(std::vector<Vec3>{{0, 0, 0}, {1, 0, 0}});
    CHECK_FALSE(fit_local_plane(map, Vec3(0, 0, 0), 5, 0.1).valid);
  }

  SUBCASE("k below 3 raises") {
    MapStore map(0.01);
    map.insert(std::vector<Vec3>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}});
    CHECK_THROWS(fit_local_plane(map, Vec3(0, 0, 0), 2, 0.1));
  }
}

TEST_CASE("deskew_scan") {
  SUBCASE("stationary sweep is unchanged") {
    PointCloud scan;
    scan.points = {{1, 0, 0}, {0, 1, 0}};
    scan.times = {0.0, 0.1};
    std::vector<TimedPose> poses{TimedPose{0.0, PoseSE3()}, TimedPose{0.1, PoseSE3()}};
    const PointCloud out = deskew_scan(scan, poses);
    for (std::size_t i = 0; i < scan.size(); ++i) {
      CHECK((out.points[i] - scan.points[i]).norm() == 0.0);
    }
  }

  SUBCASE("pure translation shifts scan-start points backward") {
    const Vec3 v(2.0, 0, 0);
    const double T = 0.1;
    PointCloud scan;
    scan.points = {{1, 0, 0}};
    scan.times = {0.0};  // captured at sweep start
    std::vector<TimedPose> poses{TimedPose{0.0, PoseSE3(Rotation(), Vec3::Zero())},
                                 TimedPose{T, PoseSE3(Rotation(), v * T)}};
    const PointCloud out = deskew_scan(scan, poses);
    CHECK((out.points[0] - (Vec3(1, 0, 0) - v * T)).norm() < 1e-12);
  }

  SUBCASE("disabled deskew is a passthrough") {
    PointCloud scan;
    scan.points = {{1, 2, 3}};
    const PointCloud out = deskew_scan(scan, {}, false);
    CHECK((out.points[0] - scan.points[0]).norm() == 0.0);
  }

  SUBCASE("missing timestamps raise when enabled") {
    PointCloud scan;
    scan.points = {{1, 2, 3}};
    std::vector<TimedPose> poses{TimedPose{0.0, PoseSE3()}};
    CHECK_THROWS(deskew_scan(scan, poses, true));
  }
}

TEST_CASE("iterated_update on the three-plane oracle") {
  const MapStore map = three_plane_map();
  const OdometryConfig config = tight_config();

  SUBCASE("perfectly aligned scan leaves the state unchanged") {
    NavState state;
    state.position = Vec3(0.3, 0.2, 0.9);
    StateCovariance cov = StateCovariance::Identity() * 1e-2;
    const PointCloud scan = pullback_scan(map, state.pose());
    const NavState before = state;
    const auto report = iterated_update(state, cov, scan, map, config);
    CHECK((state.position - before.position).norm() < 1e-9);
    CHECK(state.orientation.angle_to(before.orientation) < 1e-9);
    CHECK(report.residual_rms.front() < 1e-12);
  }

  SUBCASE("small translation offset is recovered") {
    const PoseSE3 true_pose(Rotation::identity(), Vec3(0.3, 0.2, 0.9));
    const PointCloud scan = pullback_scan(map, true_pose);

    NavState state;
    state.position = true_pose.translation + Vec3(0.1, -0.05, 0.02);
    StateCovariance cov = StateCovariance::Identity() * 1e-2;
    const auto report = iterated_update(state, cov, scan, map, config);
    CHECK((state.position - true_pose.translation).norm() < 1e-6);
    CHECK(state.orientation.angle_to(true_pose.rotation) < 1e-6);
    CHECK(report.converged);

    // contraction: pre-step residual RMS strictly decreases
    for (std::size_t i = 1; i < report.residual_rms.size(); ++i) {
      CHECK(report.residual_rms[i] < report.residual_rms[i - 1]);
    }
  }

  SUBCASE("small rotation offset is recovered") {
    const PoseSE3 true_pose(Rotation::identity(), Vec3(0.3, 0.2, 0.9));
    const PointCloud scan = pullback_scan(map, true_pose);

    NavState state;
    state.position = true_pose.translation;
    state.orientation = Rotation::exp(Vec3(0.02, -0.015, 0.03));
    StateCovariance cov = StateCovariance::Identity() * 1e-2;
    iterated_update(state, cov, scan, map, config);
    CHECK(state.orientation.angle_to(true_pose.rotation) < 1e-6);
    CHECK((state.position - true_pose.translation).norm() < 1e-6);
  }

  SUBCASE("degenerate scan raises and preserves state") {
    NavState state;
    state.position = Vec3(50.0, 50.0, 50.0);  // far from any map plane
    StateCovariance cov = StateCovariance::Identity() * 1e-2;
    PointCloud scan;
    scan.points = {{0, 0, 0}};
    OdometryConfig strict = tight_config();
    strict.plane_validity_threshold = 1e-4;
    const NavState before = state;
    CHECK_THROWS_WITH(iterated_update(state, cov, scan, map, strict), "degenerate scan");
    CHECK((state.position - before.position).norm() == 0.0);
  }
}

TEST_CASE("single-plane scan leaves in-plane translation covariance alone") {
  // Map: only z = 0 plane.
  MapStore map(0.025);
  std::vector<Vec3> pts;
  for (double a = -2.0; a <= 2.0; a += 0.05) {
    for (double b = -2.0; b <= 2.0; b += 0.05) pts.emplace_back(a, b, 0.0);
  }
  map.insert(pts);

  NavState state;
  state.position = Vec3(0, 0, 1.0);
  const PointCloud scan = pullback_scan(map, state.pose(), 5);

  StateCovariance cov = StateCovariance::Zero();
  cov.diagonal().setConstant(1e-2);  // diagonal prior
  const StateCovariance prior = cov;

  OdometryConfig config = tight_config();
  config.measurement_sigma = 0.01;
  iterated_update(state, cov, scan, map, config);

  // x/y translation are unobservable against a single horizontal plane.
  CHECK(cov(kIdxPos + 0, kIdxPos + 0) == doctest::Approx(prior(kIdxPos, kIdxPos)).epsilon(1e-6));
  CHECK(cov(kIdxPos + 1, kIdxPos + 1) == doctest::Approx(prior(kIdxPos, kIdxPos)).epsilon(1e-6));
  // z translation is observed and must shrink.
  CHECK(cov(kIdxPos + 2, kIdxPos + 2) < 0.5 * prior(kIdxPos + 2, kIdxPos + 2));
}

TEST_CASE("measurement Jacobian matches central finite differences") {
  const MapStore map = three_plane_map(1.0, 0.04);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n;

  const OdometryConfig config;
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    NavState state;
    state.position = Vec3(0.2 * n(rng), 0.2 * n(rng), 0.8 + 0.2 * n(rng));
    state.orientation = Rotation::exp(Vec3(n(rng), n(rng), n(rng)) * 0.05);

    // A handful of fixed body points with fixed plane associations.
    std::vector<Vec3> body_points;
    for (int i = 0; i < 6; ++i) body_points.emplace_back(n(rng), n(rng), n(rng));

    struct Assoc {
      Vec3 normal;
      double offset;
    };
    std::vector<Assoc> assoc;
    bool ok = true;
    for (const Vec3& p : body_points) {
      const PlaneFit fit = fit_local_plane(map, state.pose() * p, config.plane_neighbors,
                                           1e9 /* accept any */);
      if (!fit.valid) ok = false;
      assoc.push_back(Assoc{fit.normal, fit.offset});
    }
    if (!ok) continue;
    ++checked;

    // Stacked residual as a function of the error state about `state`.
    const auto residual = [&](const Eigen::Matrix<double, 18, 1>& delta) {
      Eigen::VectorXd z(body_points.size());
      const Rotation rot = state.orientation * Rotation::exp(delta.segment<3>(kIdxTheta));
      const Vec3 pos = state.position + delta.segment<3>(kIdxPos);
      for (std::size_t i = 0; i < body_points.size(); ++i) {
        z(i) = assoc[i].normal.dot(rot * body_points[i] + pos) - assoc[i].offset;
      }
      return z;
    };

    // Analytic Jacobian rows: [-n^T R [p]_x, n^T, 0...]
    Eigen::MatrixXd H(body_points.size(), 18);
    H.setZero();
    const Mat3 R = state.orientation.matrix();
    for (std::size_t i = 0; i < body_points.size(); ++i) {
      H.block<1, 3>(i, kIdxTheta) = -assoc[i].normal.transpose() * R * skew(body_points[i]);
      H.block<1, 3>(i, kIdxPos) = assoc[i].normal.transpose();
    }

    const double eps = 1e-6;
    double max_rel = 0.0;
    for (int d = 0; d < 18; ++d) {
      Eigen::Matrix<double, 18, 1> delta = Eigen::Matrix<double, 18, 1>::Zero();
      delta(d) = eps;
      const Eigen::VectorXd plus = residual(delta);
      delta(d) = -eps;
      const Eigen::VectorXd minus = residual(delta);
      const Eigen::VectorXd fd = (plus - minus) / (2.0 * eps);
      for (std::size_t i = 0; i < body_points.size(); ++i) {
        const double rel = std::abs(fd(i) - H(i, d)) / std::max(1.0, std::abs(H(i, d)));
        max_rel = std::max(max_rel, rel);
      }
    }
    CHECK(max_rel < 1e-4);
  }
  CHECK(checked >= 90);
}
