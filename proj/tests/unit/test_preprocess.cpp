#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <set>

#include "oracles.hpp"
#include "radarsr/errors.hpp"
#include "radarsr/preprocess.hpp"

using namespace radarsr;

namespace {

constexpr double kPi = std::numbers::pi;

void add_plane(PointCloud& c, SeededRng& rng, std::size_t n, double z, double half) {
  for (std::size_t i = 0; i < n; ++i) c.points.push_back({rng.uniform(-half, half), rng.uniform(-half, half), z});
}

void add_box(PointCloud& c, SeededRng& rng, std::size_t n, Eigen::Vector3d lo, Eigen::Vector3d hi) {
  for (std::size_t i = 0; i < n; ++i) {
    c.points.push_back({rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()), rng.uniform(lo.z(), hi.z())});
  }
}

void add_blob(PointCloud& c, SeededRng& rng, std::size_t n, Point3 center, double spread) {
  for (std::size_t i = 0; i < n; ++i) {
    c.points.push_back({center.x + spread * rng.normal(), center.y + spread * rng.normal(),
                        center.z + spread * rng.normal()});
  }
}

std::set<std::tuple<double, double, double>> as_set(const PointCloud& c) {
  std::set<std::tuple<double, double, double>> s;
  for (const auto& p : c.points) s.emplace(p.x, p.y, p.z);
  return s;
}

}  // namespace

TEST_CASE("fov crop equals the predicate filter and is idempotent") {
  const AngularFov f{-kPi / 3, kPi / 3, kPi / 2 - 0.3, kPi / 2 + 0.3, 0.5, 10.0};
  SeededRng rng(1);
  PointCloud c = oracle::random_cloud(rng, 2000, 12.0, "lidar");
  c.points.push_back(from_spherical({5.0, f.theta_min, kPi / 2}));
  c.points.push_back(from_spherical({11.0, 0.0, kPi / 2}));
  const PointCloud out = shared_fov_crop(c, f);
  std::vector<Point3> want;
  for (const auto& p : c.points) {
    const double r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    const double th = std::atan2(p.y, p.x);
    const double ph = std::acos(p.z / r);
    if (r >= f.r_min && r <= f.r_max && th >= f.theta_min && th < f.theta_max && ph >= f.phi_min && ph < f.phi_max) {
      want.push_back(p);
    }
  }
  CHECK(out.points == want);
  CHECK(out.frame_id == "lidar");
  CHECK(shared_fov_crop(out, f).points == out.points);
  CHECK(std::find(out.points.begin(), out.points.end(), c.points[c.size() - 2]) != out.points.end());
  CHECK(std::find(out.points.begin(), out.points.end(), c.points.back()) == out.points.end());
}

TEST_CASE("ground removal strips the floor and keeps the box") {
  SeededRng rng(2);
  PointCloud c;
  add_plane(c, rng, 1000, 0.0, 5.0);
  const std::size_t floor_n = c.size();
  add_box(c, rng, 200, {1.0, 1.0, 0.5}, {2.0, 2.0, 1.5});
  GroundRemovalParams p;
  p.flip_pass = false;
  const auto res = remove_ground_and_ceiling(c, p);
  REQUIRE(res.ground.has_value());
  CHECK(std::abs(res.ground->normal.norm() - 1.0) < 1e-9);
  CHECK(res.removed_ground >= 990);
  const auto kept = as_set(res.cloud);
  for (std::size_t i = floor_n; i < c.size(); ++i) CHECK(kept.count({c.points[i].x, c.points[i].y, c.points[i].z}) == 1);
}

TEST_CASE("the flipped pass removes the ceiling") {
  SeededRng rng(3);
  PointCloud c;
  add_plane(c, rng, 1000, 0.0, 5.0);
  add_plane(c, rng, 1000, 3.0, 5.0);
  const std::size_t planes = c.size();
  add_box(c, rng, 200, {1.0, 1.0, 0.5}, {2.0, 2.0, 1.5});
  const auto res = remove_ground_and_ceiling(c, {});
  REQUIRE(res.ground.has_value());
  REQUIRE(res.ceiling.has_value());
  CHECK(res.removed_ground + res.removed_ceiling >= 1980);
  CHECK(res.cloud.size() >= 200);
  const auto kept = as_set(res.cloud);
  for (std::size_t i = planes; i < c.size(); ++i) CHECK(kept.count({c.points[i].x, c.points[i].y, c.points[i].z}) == 1);
  // Nothing farther than the tolerance from a fitted plane is removed.
  for (const auto& q : c.points) {
    if (kept.count({q.x, q.y, q.z})) continue;
    CHECK(std::min(res.ground->distance(q), res.ceiling->distance(q)) <= 0.1 + 1e-12);
  }
}

TEST_CASE("ground removal leaves clouds without plane support alone") {
  SeededRng rng(4);
  PointCloud c;
  add_box(c, rng, 300, {-1, -1, -10}, {1, 1, 10});
  const auto res = remove_ground_and_ceiling(c, {});
  CHECK(res.cloud.points == c.points);
  CHECK_FALSE(res.ground.has_value());

  PointCloud tiny;
  tiny.points = {{0, 0, 0}, {1, 0, 0}};
  const auto t = remove_ground_and_ceiling(tiny, {});
  CHECK(t.too_few_points);
  CHECK(t.cloud.points == tiny.points);
}

TEST_CASE("dbscan basic cases") {
  SeededRng rng(5);
  PointCloud two;
  add_blob(two, rng, 40, {0, 0, 0}, 0.05);
  add_blob(two, rng, 40, {10, 0, 0}, 0.05);
  const auto l = dbscan(two, 0.5, 5);
  CHECK(l.cluster_count == 2);
  CHECK(std::count(l.labels.begin(), l.labels.end(), kNoise) == 0);
  CHECK(l.labels.front() == 0);
  CHECK(l.labels.back() == 1);

  PointCloud one;
  one.points.push_back({1, 2, 3});
  CHECK(dbscan(one, 0.5, 2).labels == std::vector<int>{kNoise});
  CHECK(dbscan(one, 0.5, 1).labels == std::vector<int>{0});
  CHECK(dbscan(PointCloud{}, 0.5, 5).labels.empty());
  CHECK_THROWS_AS(dbscan(one, 0.0, 2), ConfigError);
}

TEST_CASE("dbscan equals the union-find oracle") {
  SeededRng rng(6);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng.below(200);
    PointCloud c;
    const int blobs = 1 + static_cast<int>(rng.below(5));
    for (std::size_t i = 0; i < n; ++i) {
      const double cx = 2.0 * static_cast<double>(rng.below(static_cast<std::uint64_t>(blobs)));
      c.points.push_back({cx + rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), rng.uniform(-0.3, 0.3)});
    }
    const double eps = rng.uniform(0.1, 0.5);
    const int min_pts = 1 + static_cast<int>(rng.below(8));
    const auto got = dbscan(c, eps, min_pts);
    const auto want = oracle::dbscan(c, eps, min_pts);
    CHECK(got.labels == want);
    const int k = want.empty() ? 0 : *std::max_element(want.begin(), want.end()) + 1;
    CHECK(got.cluster_count == k);
  }
}

TEST_CASE("radar-guided filter keeps supported clusters only") {
  SeededRng rng(7);
  PointCloud lidar;
  lidar.frame_id = "lidar";
  add_blob(lidar, rng, 60, {0, 0, 0}, 0.05);
  add_blob(lidar, rng, 60, {5, 0, 0}, 0.05);
  const std::size_t supported = lidar.size();
  add_blob(lidar, rng, 60, {0, 8, 0}, 0.05);
  PointCloud radar;
  radar.frame_id = "lidar";
  radar.points = {{0.1, 0, 0}, {5.1, 0.0, 0.0}, {0, -20, 0}};
  const PointCloud out = radar_guided_filter(lidar, radar, {});
  CHECK(out.points == std::vector<Point3>(lidar.points.begin(), lidar.points.begin() + supported));

  PointCloud far_radar;
  far_radar.frame_id = "lidar";
  far_radar.points = {{30, 30, 30}};
  CHECK(radar_guided_filter(lidar, far_radar, {}).empty());

  PointCloud wrong = radar;
  wrong.frame_id = "radar";
  CHECK_THROWS_AS(radar_guided_filter(lidar, wrong, {}), ConfigError);
}
