#include <doctest.h>

#include <random>

#include "orchard/camera.hpp"

using namespace orchard;

namespace {

CameraIntrinsics test_intrinsics(double k1 = 0.0, double k2 = 0.0) {
  CameraIntrinsics intr;
  intr.fx = 400.0;
  intr.fy = 410.0;
  intr.cx = 320.0;
  intr.cy = 240.0;
  intr.width = 640;
  intr.height = 480;
  intr.k1 = k1;
  intr.k2 = k2;
  return intr;
}

}  // namespace

TEST_CASE("optical axis projects to the principal point") {
  const auto intr = test_intrinsics(-0.1, 0.02);
  for (double z : {0.5, 1.0, 7.0}) {
    const auto p = project_point(intr, Vec3(0, 0, z));
    CHECK(p.u == doctest::Approx(intr.cx));
    CHECK(p.v == doctest::Approx(intr.cy));
    CHECK(p.in_bounds);
  }
}

TEST_CASE("zero-distortion pinhole closed form") {
  const auto intr = test_intrinsics();
  const double X = 0.3, Z = 2.0;
  const auto p = project_point(intr, Vec3(X, 0, Z));
  CHECK(p.u == doctest::Approx(intr.fx * X / Z + intr.cx).epsilon(1e-12));
  CHECK(p.v == doctest::Approx(intr.cy).epsilon(1e-12));
}

TEST_CASE("points behind the camera raise") {
  const auto intr = test_intrinsics();
  CHECK_THROWS_WITH(project_point(intr, Vec3(0, 0, -1.0)), "behind camera");
  CHECK_FALSE(try_project(intr, Vec3(0, 0, 0)).has_value());
}

TEST_CASE("out-of-bounds flag") {
  const auto intr = test_intrinsics();
  CHECK_FALSE(project_point(intr, Vec3(10.0, 0, 1.0)).in_bounds);
  CHECK(project_point(intr, Vec3(0.1, 0.1, 1.0)).in_bounds);
}

TEST_CASE("project then unproject recovers the point") {
  const auto intr = test_intrinsics(-0.28, 0.07);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  std::uniform_real_distribution<double> uz(0.3, 5.0);
  for (int i = 0; i < 500; ++i) {
    const double z = uz(rng);
    const Vec3 p(u(rng) * z, u(rng) * z, z);
    const auto proj = try_project(intr, p);
    REQUIRE(proj.has_value());
    const Vec3 back = unproject(intr, proj->u, proj->v, z);
    CHECK((back - p).norm() < 1e-6);
  }
}

TEST_CASE("intrinsics validation") {
  auto intr = test_intrinsics();
  CHECK_NOTHROW(intr.validate());
  intr.fx = 0.0;
  CHECK_THROWS(intr.validate());
  intr = test_intrinsics();
  intr.cx = 900.0;
  CHECK_THROWS(intr.validate());
}
