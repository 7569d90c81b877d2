#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "radarsr/cfar.hpp"
#include "radarsr/errors.hpp"

using namespace radarsr;

namespace {

PowerMapGeometry geom(int nr, int na, int ne = 1) {
  PowerMapGeometry g;
  g.range_bins = nr;
  g.azimuth_bins = na;
  g.elevation_bins = ne;
  g.range_min = 0.0;
  g.range_res = 0.1;
  g.azimuth_min = -1.0;
  g.azimuth_res = 2.0 / na;
  g.elevation_min = 1.2;
  g.elevation_res = 0.7 / ne;
  return g;
}

std::vector<oracle::Cell> cells(const std::vector<Detection>& d) {
  std::vector<oracle::Cell> out;
  for (const auto& x : d) out.push_back({x.range_bin, x.azimuth_bin, x.elevation_bin});
  return out;
}

}  // namespace

TEST_CASE("flat floor with one strong cell") {
  PowerMap m{geom(64, 4), std::vector<double>(256, 1.0)};
  m.power[m.geometry.index(30, 2, 0)] = 100.0;
  const auto d = os_cfar(m, {});
  REQUIRE(d.size() == 1);
  CHECK(d[0].range_bin == 30);
  CHECK(d[0].azimuth_bin == 2);
  CHECK(d[0].power == 100.0);
}

TEST_CASE("degenerate thresholds") {
  SeededRng rng(1);
  PowerMap m{geom(32, 8), std::vector<double>(256)};
  for (auto& p : m.power) p = rng.bernoulli(0.2) ? 0.0 : rng.exponential();
  CfarParams p;
  p.alpha = 0.0;
  std::size_t positive = 0;
  for (double v : m.power) positive += v > 0.0;
  CHECK(os_cfar(m, p).size() == positive);

  PowerMap zero{geom(32, 8), std::vector<double>(256, 0.0)};
  for (double a : {1e-3, 1.0, 5.0}) {
    p.alpha = a;
    CHECK(os_cfar(zero, p).empty());
  }
}

TEST_CASE("parameter validation") {
  PowerMap m{geom(1, 1), std::vector<double>(1, 1.0)};
  CHECK_THROWS_AS(os_cfar(m, {}), ConfigError);  // no training cells at all
  CfarParams p;
  p.k_rank = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.train = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK(CfarParams::near_zero().alpha == 1e-3);
}

TEST_CASE("os-cfar equals the brute-force oracle") {
  SeededRng rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const int nr = 4 + static_cast<int>(rng.below(61));
    const int na = 1 + static_cast<int>(rng.below(64));
    const int ne = trial % 5 == 0 ? 2 : 1;
    PowerMap m{geom(nr, na, ne), {}};
    m.power.resize(m.geometry.cells());
    for (auto& v : m.power) v = rng.exponential() * (rng.bernoulli(0.02) ? 200.0 : 1.0);
    CfarParams p;
    p.guard = static_cast<int>(rng.below(3));
    p.train = 1 + static_cast<int>(rng.below(12));
    p.k_rank = rng.uniform(0.05, 1.0);
    p.alpha = rng.uniform(0.5, 8.0);
    p.window = trial % 2 ? CfarWindow::kRange : CfarWindow::kRangeAzimuth;
    CHECK(cells(os_cfar(m, p)) == oracle::os_cfar(m, p));
  }
}

TEST_CASE("detections shrink as alpha grows") {
  const PowerMap m = synth_power_map(geom(64, 32), {{3.0, 0.1, 1.5, 15.0}}, 9);
  std::size_t prev = m.power.size() + 1;
  std::vector<oracle::Cell> prev_set;
  for (double a : {1e-3, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0}) {
    CfarParams p;
    p.alpha = a;
    const auto d = cells(os_cfar(m, p));
    CHECK(d.size() <= prev);
    for (const auto& c : d) {
      const bool known = prev_set.empty() || std::find(prev_set.begin(), prev_set.end(), c) != prev_set.end();
      CHECK(known);
    }
    prev = d.size();
    prev_set = d;
  }
}

TEST_CASE("synthetic maps") {
  const auto g = geom(100, 100);
  const PowerMap noise = synth_power_map(g, {}, 3);
  double s = 0.0;
  for (double v : noise.power) s += v;
  CHECK(std::abs(s / 1e4 - 1.0) < 0.05);
  CHECK(synth_power_map(g, {}, 3).power == noise.power);

  const PointTarget t{5.05, 0.01, 1.5, 20.0};
  const PowerMap m = synth_power_map(g, {t}, 3);
  const auto it = std::max_element(m.power.begin(), m.power.end());
  CHECK(static_cast<std::size_t>(it - m.power.begin()) == g.index(50, 50, 0));
  CHECK_THROWS_AS(synth_power_map(g, {{50.0, 0.0, 1.5, 20.0}}, 3), ConfigError);
}

TEST_CASE("false-alarm rate on pure noise") {
  // Exp(1) training cells, 24 of them, 18th order statistic: the exact false-alarm
  // probability at alpha is prod_{i=0}^{17} (24 - i) / (24 - i + alpha).
  auto pfa = [](double alpha) {
    double p = 1.0;
    for (int i = 0; i < 18; ++i) p *= (24.0 - i) / (24.0 - i + alpha);
    return p;
  };
  const auto g = geom(400, 256);
  double prev = 1.0;
  for (double alpha : {1.0, 2.0, 5.0}) {
    std::vector<double> rates;
    for (std::uint64_t seed : {11, 12, 13}) {
      const PowerMap m = synth_power_map(g, {}, seed);
      CfarParams p;
      p.alpha = alpha;
      // Interior cells only: edge windows are truncated and follow a different law.
      std::size_t hits = 0, total = 0;
      for (const auto& d : os_cfar(m, p)) hits += d.range_bin >= 14 && d.range_bin < 386;
      total = static_cast<std::size_t>(372) * 256;
      rates.push_back(static_cast<double>(hits) / static_cast<double>(total));
    }
    for (double r : rates) {
      CHECK(std::abs(r - pfa(alpha)) / pfa(alpha) < 0.3);
      CHECK(r < prev);
    }
    prev = *std::min_element(rates.begin(), rates.end());
  }
}

TEST_CASE("detections convert at bin centers") {
  Detection d;
  d.position = {5.0, 0.0, std::numbers::pi / 2};
  const PointCloud c = detections_to_cloud({d});
  CHECK(c.frame_id == "radar");
  CHECK(c.points[0].x == doctest::Approx(5.0));
  CHECK(std::abs(c.points[0].y) < 1e-12);
  CHECK(std::abs(c.points[0].z) < 1e-12);
  CHECK(detections_to_cloud({}).empty());

  const auto g = geom(10, 10);
  const Spherical s = g.bin_center(3, 4, 0);
  CHECK(s.r == doctest::Approx(0.35));
  CHECK(s.theta == doctest::Approx(-1.0 + 4.5 * 0.2));
}

TEST_CASE("power map files round trip") {
  const PowerMap m = synth_power_map(geom(16, 8, 2), {{0.5, 0.0, 1.5, 20.0}}, 4);
  std::stringstream ss;
  write_power_map(ss, m);
  const PowerMap back = read_power_map(ss);
  CHECK(back.geometry == m.geometry);
  for (std::size_t i = 0; i < m.power.size(); ++i) CHECK(back.power[i] == static_cast<double>(static_cast<float>(m.power[i])));
  std::string bytes = ss.str();
  std::stringstream cut(bytes.substr(0, bytes.size() - 1));
  CHECK_THROWS_AS(read_power_map(cut), LoadError);
}
