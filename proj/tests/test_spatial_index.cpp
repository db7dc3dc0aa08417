#include <doctest.h>

#include <algorithm>
#include <random>

#include "orchard/spatial_index.hpp"

using namespace orchard;

namespace {

// Brute-force oracle with the same (distance, index) ordering.
std::vector<Neighbor> brute_knn(const std::vector<Vec3>& pts, const Vec3& q, std::size_t k) {
  std::vector<Neighbor> all;
  for (std::size_t i = 0; i < pts.size(); ++i) all.push_back({i, (pts[i] - q).norm()});
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  });
  if (all.size() > k) all.resize(k);
  return all;
}

std::vector<Vec3> random_cloud(std::mt19937_64& rng, std::size_t n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<Vec3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  return pts;
}

}  // namespace

TEST_CASE("knn trivial cases") {
  const std::vector<Vec3> pts{{1, 0, 0}, {0, 2, 0}, {0, 0, 3}};
  SpatialIndex index(pts);

  SUBCASE("query point contained") {
    const auto nn = index.knn(Vec3(1, 0, 0), 1);
    REQUIRE(nn.size() == 1);
    CHECK(nn[0].distance == 0.0);
    CHECK(nn[0].index == 0);
  }
  SUBCASE("two nearest from origin") {
    const auto nn = index.knn(Vec3(0, 0, 0), 2);
    REQUIRE(nn.size() == 2);
    CHECK(nn[0].index == 0);
    CHECK(nn[0].distance == doctest::Approx(1.0));
    CHECK(nn[1].index == 1);
    CHECK(nn[1].distance == doctest::Approx(2.0));
  }
  SUBCASE("k larger than cloud returns whole cloud sorted") {
    const auto nn = index.knn(Vec3(0, 0, 0), 10);
    REQUIRE(nn.size() == 3);
    CHECK(nn[0].distance <= nn[1].distance);
    CHECK(nn[1].distance <= nn[2].distance);
  }
  SUBCASE("empty index raises") {
    SpatialIndex empty;
    CHECK_THROWS_WITH(empty.knn(Vec3(0, 0, 0), 1), "empty index");
  }
}

TEST_CASE("knn matches brute force on random clouds") {
  std::mt19937_64 rng(991);
  const auto pts = random_cloud(rng, 10000, 10.0);
  SpatialIndex index(pts);
  std::uniform_int_distribution<int> kdist(1, 12);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec3 q = Vec3(rng() % 2000 / 100.0 - 10.0, rng() % 2000 / 100.0 - 10.0,
                        rng() % 2000 / 100.0 - 10.0);
    const std::size_t k = kdist(rng);
    const auto got = index.knn(q, k);
    const auto want = brute_knn(pts, q, k);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].index == want[i].index);
      CHECK(got[i].distance == want[i].distance);
    }
  }
}

TEST_CASE("knn distance ties break by input index") {
  // Eight corners of a cube, all equidistant from the center.
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) {
    pts.emplace_back(i & 1 ? 1 : -1, i & 2 ? 1 : -1, i & 4 ? 1 : -1);
  }
  SpatialIndex index(pts);
  const auto nn = index.knn(Vec3(0, 0, 0), 3);
  REQUIRE(nn.size() == 3);
  CHECK(nn[0].index == 0);
  CHECK(nn[1].index == 1);
  CHECK(nn[2].index == 2);
}

TEST_CASE("radius search matches brute force") {
  std::mt19937_64 rng(4242);
  const auto pts = random_cloud(rng, 2000, 2.0);
  SpatialIndex index(pts);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 q = pts[rng() % pts.size()];
    const double r = 0.05 + 0.3 * (rng() % 100) / 100.0;
    const auto got = index.radius_search(q, r);
    std::size_t want = 0;
    for (const auto& p : pts) want += ((p - q).norm() <= r);
    CHECK(got.size() == want);
    for (std::size_t i = 1; i < got.size(); ++i) CHECK(got[i - 1].distance <= got[i].distance);
  }
}

TEST_CASE("nearest_dist2 equals exact squared distance") {
  std::mt19937_64 rng(5);
  const auto pts = random_cloud(rng, 500, 1.0);
  SpatialIndex index(pts);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec3 q = random_cloud(rng, 1, 2.0)[0];
    double want = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) want = std::min(want, (p - q).squaredNorm());
    CHECK(index.nearest_dist2(q) == want);
  }
}
