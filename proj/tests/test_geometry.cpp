#include <doctest.h>

#include <random>

#include "orchard/geometry.hpp"

using namespace orchard;

namespace {

Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Rotation(n(rng), n(rng), n(rng), n(rng));
}

Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(rng), u(rng), u(rng));
}

}  // namespace

TEST_CASE("rotation unit norm and canonical sign") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Rotation a = random_rotation(rng);
    const Rotation b = random_rotation(rng);
    const Rotation c = a * b;
    CHECK(std::abs(c.norm() - 1.0) < 1e-9);
    CHECK(c.w() >= 0.0);
  }
}

TEST_CASE("rotation exp/log round trip") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Vec3 v = random_vec(rng, 2.0);
    const Vec3 back = Rotation::exp(v).log();
    const Rotation r1 = Rotation::exp(v);
    const Rotation r2 = Rotation::exp(back);
    CHECK(r1.angle_to(r2) < 1e-9);
  }
  CHECK(Rotation::exp(Vec3::Zero()).angle_to(Rotation::identity()) == 0.0);
}

TEST_CASE("pose compose identity and inverse") {
  std::mt19937_64 rng(13);
  const PoseSE3 p(random_rotation(rng), random_vec(rng, 5.0));

  const PoseSE3 idp = pose_compose(PoseSE3::identity(), p);
  CHECK(idp.rotation.angle_to(p.rotation) < 1e-12);
  CHECK((idp.translation - p.translation).norm() < 1e-12);

  const PoseSE3 should_be_identity = pose_compose(p, p.inverse());
  CHECK(should_be_identity.rotation.angle_to(Rotation::identity()) < 1e-9);
  CHECK(should_be_identity.translation.norm() < 1e-9);
}

TEST_CASE("pose compose pure translations") {
  const PoseSE3 a(Rotation::identity(), Vec3(1, 0, 0));
  const PoseSE3 b(Rotation::identity(), Vec3(0, 2, 0));
  const PoseSE3 c = pose_compose(a, b);
  CHECK((c.translation - Vec3(1, 2, 0)).norm() == 0.0);
}

TEST_CASE("pose composition applies b then a") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const PoseSE3 a(random_rotation(rng), random_vec(rng));
    const PoseSE3 b(random_rotation(rng), random_vec(rng));
    const Vec3 p = random_vec(rng, 3.0);
    CHECK(((a * b) * p - a * (b * p)).norm() < 1e-12);
  }
}

TEST_CASE("interpolate_pose midpoints and clamping") {
  std::vector<TimedPose> poses;
  poses.push_back(TimedPose{0.0, PoseSE3(Rotation::identity(), Vec3(0, 0, 0))});
  poses.push_back(TimedPose{1.0, PoseSE3(Rotation::exp(Vec3(0, 0, M_PI / 2)), Vec3(2, 0, 0))});

  const PoseSE3 mid = interpolate_pose(poses, 0.5);
  CHECK((mid.translation - Vec3(1, 0, 0)).norm() < 1e-12);
  CHECK(mid.rotation.angle_to(Rotation::exp(Vec3(0, 0, M_PI / 4))) < 1e-9);

  CHECK((interpolate_pose(poses, -1.0).translation - Vec3(0, 0, 0)).norm() == 0.0);
  CHECK((interpolate_pose(poses, 9.0).translation - Vec3(2, 0, 0)).norm() == 0.0);
  CHECK_THROWS(interpolate_pose({}, 0.0));
}
