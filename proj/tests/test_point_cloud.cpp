#include <doctest.h>

#include <random>

#include "orchard/point_cloud.hpp"

using namespace orchard;

TEST_CASE("transform_points identity and known rotations") {
  PointCloud cloud;
  cloud.points = {{1, 0, 0}, {0, 1, 0}};
  cloud.times = {0.0, 0.1};

  SUBCASE("identity pose keeps the cloud") {
    const PointCloud out = transform_points(PoseSE3::identity(), cloud);
    CHECK((out.points[0] - cloud.points[0]).norm() == 0.0);
    CHECK(out.times == cloud.times);
  }
  SUBCASE("180 degree yaw flips x") {
    const PoseSE3 yaw(Rotation::exp(Vec3(0, 0, M_PI)), Vec3::Zero());
    const PointCloud out = transform_points(yaw, cloud);
    CHECK((out.points[0] - Vec3(-1, 0, 0)).norm() < 1e-9);
  }
  SUBCASE("translation on empty cloud") {
    const PointCloud out = transform_points(PoseSE3(Rotation(), Vec3(5, 5, 5)), PointCloud{});
    CHECK(out.empty());
  }
}

TEST_CASE("transform round trip restores the cloud") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  PointCloud cloud;
  for (int i = 0; i < 500; ++i) cloud.points.emplace_back(u(rng), u(rng), u(rng));
  std::normal_distribution<double> n;
  const PoseSE3 pose(Rotation(n(rng), n(rng), n(rng), n(rng)), Vec3(u(rng), u(rng), u(rng)));

  const PointCloud back = transform_points(pose.inverse(), transform_points(pose, cloud));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK((back.points[i] - cloud.points[i]).norm() < 1e-9);
  }
}

TEST_CASE("voxel_downsample basics") {
  SUBCASE("all points in one voxel collapse to the centroid") {
    PointCloud cloud;
    cloud.points = {{0.01, 0.01, 0.01}, {0.02, 0.02, 0.02}, {0.03, 0.03, 0.03}};
    const PointCloud out = voxel_downsample(cloud, 0.1);
    REQUIRE(out.size() == 1);
    CHECK((out.points[0] - Vec3(0.02, 0.02, 0.02)).norm() < 1e-12);
  }
  SUBCASE("distant points both retained") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {1.0, 0, 0}};
    CHECK(voxel_downsample(cloud, 0.1).size() == 2);
  }
  SUBCASE("hand-computed mixed case") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {0.04, 0, 0}, {1.0, 0, 0}};
    const PointCloud out = voxel_downsample(cloud, 0.1);
    REQUIRE(out.size() == 2);
    CHECK((out.points[0] - Vec3(0.02, 0, 0)).norm() < 1e-12);
    CHECK((out.points[1] - Vec3(1.0, 0, 0)).norm() < 1e-12);
  }
  SUBCASE("non-positive voxel size raises") {
    CHECK_THROWS(voxel_downsample(PointCloud{}, 0.0));
    CHECK_THROWS(voxel_downsample(PointCloud{}, -1.0));
  }
}

TEST_CASE("voxel_downsample is idempotent") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  PointCloud cloud;
  for (int i = 0; i < 5000; ++i) cloud.points.emplace_back(u(rng), u(rng), u(rng));

  const PointCloud once = voxel_downsample(cloud, 0.25);
  const PointCloud twice = voxel_downsample(once, 0.25);
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK((once.points[i] - twice.points[i]).norm() == 0.0);
  }
}

TEST_CASE("point cloud validation") {
  PointCloud cloud;
  cloud.points = {{0, 0, 0}, {1, 1, 1}};
  cloud.times = {0.0, 0.1};
  CHECK_NOTHROW(cloud.validate());

  cloud.times = {0.1, 0.0};
  CHECK_THROWS(cloud.validate());

  cloud.times.clear();
  cloud.points.push_back(Vec3(std::nan(""), 0, 0));
  CHECK_THROWS(cloud.validate());
}
