#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "radarsr/errors.hpp"
#include "radarsr/kdtree.hpp"
#include "radarsr/rng.hpp"
#include "radarsr/tensor.hpp"
#include "radarsr/types.hpp"

using namespace radarsr;

namespace {

RigidTransform random_transform(SeededRng& rng, std::string src, std::string dst) {
  return RigidTransform::from_rpy(rng.uniform(-3, 3), rng.uniform(-1.5, 1.5), rng.uniform(-3, 3),
                                  {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)}, std::move(src),
                                  std::move(dst));
}

}  // namespace

TEST_CASE("spherical coordinates follow the azimuth/polar convention") {
  const Spherical s = to_spherical({0.0, 1.0, 0.0});
  CHECK(s.r == doctest::Approx(1.0));
  CHECK(s.theta == doctest::Approx(std::numbers::pi / 2));
  CHECK(s.phi == doctest::Approx(std::numbers::pi / 2));
  CHECK(to_spherical({0, 0, 2}).phi == doctest::Approx(0.0));
  CHECK(to_spherical({-1, 0, 0}).theta == doctest::Approx(std::numbers::pi));

  SeededRng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Point3 p{rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)};
    const Point3 q = from_spherical(to_spherical(p));
    CHECK(std::abs(p.x - q.x) < 1e-12);
    CHECK(std::abs(p.y - q.y) < 1e-12);
    CHECK(std::abs(p.z - q.z) < 1e-12);
  }
}

TEST_CASE("fov window is closed below and open above in angle, closed in range") {
  const AngularFov f{-1.0, 1.0, 1.0, 2.0, 0.5, 10.0};
  CHECK(f.contains({5.0, -1.0, 1.5}));
  CHECK_FALSE(f.contains({5.0, 1.0, 1.5}));
  CHECK(f.contains({5.0, 0.0, 1.0}));
  CHECK_FALSE(f.contains({5.0, 0.0, 2.0}));
  CHECK(f.contains({0.5, 0.0, 1.5}));
  CHECK(f.contains({10.0, 0.0, 1.5}));
  CHECK_FALSE(f.contains({10.0001, 0.0, 1.5}));

  CHECK_THROWS_AS((AngularFov{1.0, 1.0, 0.0, 1.0, 0.0, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((AngularFov{0.0, 1.0, 0.0, 1.0, -1.0, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((AngularFov{0.0, 1.0, 0.0, 1.0, 2.0, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((ImageGeometry{0, 4, f}.validate()), ConfigError);
}

TEST_CASE("rigid transforms: identity, translation, yaw") {
  SeededRng rng(11);
  const PointCloud c = oracle::random_cloud(rng, 50, 3.0, "a");
  CHECK(apply_transform(c, RigidTransform::identity("a")).points == c.points);

  const RigidTransform t(Eigen::Matrix3d::Identity(), {1, 0, 0});
  CHECK(t.apply({0, 0, 0}) == Point3{1, 0, 0});

  const auto yaw = RigidTransform::from_rpy(0, 0, std::numbers::pi / 2, Eigen::Vector3d::Zero());
  const Point3 p = yaw.apply({1, 0, 0});
  CHECK(std::abs(p.x) < 1e-12);
  CHECK(std::abs(p.y - 1.0) < 1e-12);
  CHECK(std::abs(p.z) < 1e-12);
}

TEST_CASE("rigid transforms reject non-rotations") {
  Eigen::Matrix3d scaled = Eigen::Matrix3d::Identity() * 1.001;
  CHECK_THROWS_AS(RigidTransform(scaled, Eigen::Vector3d::Zero()), ConfigError);
  Eigen::Matrix3d reflect = Eigen::Matrix3d::Identity();
  reflect(2, 2) = -1.0;
  CHECK_THROWS_AS(RigidTransform(reflect, Eigen::Vector3d::Zero()), ConfigError);
}

TEST_CASE("rigid transforms compose and invert") {
  SeededRng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto A = random_transform(rng, "a", "b");
    const auto B = random_transform(rng, "b", "c");
    const PointCloud c = oracle::random_cloud(rng, 40, 5.0, "a");
    const PointCloud two_step = apply_transform(apply_transform(c, A), B);
    const PointCloud composed = apply_transform(c, B.after(A));
    CHECK(composed.frame_id == "c");
    const PointCloud back = apply_transform(apply_transform(c, A), A.inverse());
    CHECK(back.frame_id == "a");
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK((two_step.points[i].vec() - composed.points[i].vec()).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((back.points[i].vec() - c.points[i].vec()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("frame mismatches are errors") {
  PointCloud c;
  c.frame_id = "radar";
  c.points.push_back({1, 2, 3});
  const RigidTransform t(Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero(), "lidar", "world");
  CHECK_THROWS_AS(apply_transform(c, t), ConfigError);
  const RigidTransform a(Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero(), "a", "b");
  const RigidTransform b(Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero(), "c", "d");
  CHECK_THROWS_AS(b.after(a), ConfigError);
  PointCloud other;
  other.frame_id = "lidar";
  CHECK_THROWS_AS(require_same_frame(c, other, "test"), ConfigError);
}

TEST_CASE("seeded rng is reproducible and has the documented distributions") {
  SeededRng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    differs |= x != c.uniform();
  }
  CHECK(differs);

  // mt19937_64 is fixed by the standard: the 10000th output for the default seed.
  std::mt19937_64 ref;
  for (int i = 0; i < 9999; ++i) ref();
  CHECK(ref() == 9981545732273789042ULL);

  SeededRng r(7);
  const int n = 200000;
  double s = 0, s2 = 0, se = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
    se += r.exponential();
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
  CHECK(std::abs(se / n - 1.0) < 0.02);

  std::vector<int> hist(5, 0);
  for (int i = 0; i < 50000; ++i) ++hist[r.below(5)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 400);

  CHECK(SeededRng::derive(1, 2) == SeededRng::derive(1, 2));
  CHECK(SeededRng::derive(1, 2) != SeededRng::derive(1, 3));
  CHECK(SeededRng::derive(1, 2) != SeededRng::derive(2, 2));
}

TEST_CASE("tensor layout and arithmetic") {
  Tensor t(2, 3, 4, 1.0);
  CHECK(t.size() == 24);
  t.at(1, 2, 3) = 5.0;
  CHECK(t[23] == 5.0);
  CHECK(t.channel(1)[11] == 5.0);
  Tensor u(2, 3, 4, 2.0);
  t.axpy(0.5, u);
  CHECK(t[0] == 2.0);
  t.scale(2.0);
  CHECK(t[23] == 12.0);
  CHECK(t.all_finite());
  t[3] = std::nan("");
  CHECK_FALSE(t.all_finite());
}

TEST_CASE("k-d tree nearest and radius queries equal exhaustive search") {
  SeededRng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = 1 + rng.below(400);
    PointCloud c = oracle::random_cloud(rng, n, 2.0);
    // Duplicates exercise the lower-index tie rule.
    if (n > 10) c.points[n - 1] = c.points[3];
    const KdTree tree(c.points);
    for (int q = 0; q < 50; ++q) {
      const Point3 p = q % 7 == 0 ? c.points[3] : Point3{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
      const auto nb = tree.nearest(p);
      const auto want = oracle::nearest_index(c.points, p);
      CHECK(nb.index == want);
      CHECK(nb.squared_distance == squared_distance(c.points[want], p));

      const double r = rng.uniform(0.1, 1.5);
      std::vector<std::size_t> brute;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (squared_distance(c.points[i], p) <= r * r) brute.push_back(i);
      }
      CHECK(tree.radius(p, r) == brute);
    }
  }
}
