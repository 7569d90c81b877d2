#include <doctest.h>

#include <cstring>
#include <sstream>

#include "oracles.hpp"
#include "radarsr/cloud_io.hpp"
#include "radarsr/config.hpp"
#include "radarsr/errors.hpp"
#include "radarsr/synth.hpp"

using namespace radarsr;

namespace {

std::string floats(std::initializer_list<float> v) {
  std::string s(v.size() * 4, '\0');
  std::size_t i = 0;
  for (float f : v) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    for (int b = 0; b < 4; ++b) s[i++] = static_cast<char>((u >> (8 * b)) & 0xff);
  }
  return s;
}

PipelineConfig desk_config() {
  PipelineConfig c;
  c.sensors.lidar_height = 32;
  c.sensors.lidar_width = 128;
  c.sensors.radar_height = 16;
  c.sensors.radar_width = 16;
  c.synth.frames = 4;
  return c;
}

}  // namespace

TEST_CASE("lidar bin records") {
  std::stringstream two(floats({1, 2, 3, 0.5f, -4, 5.5f, 6, 9}));
  const PointCloud c = read_lidar_bin(two, "two.bin");
  CHECK(c.points == std::vector<Point3>{{1, 2, 3}, {-4, 5.5, 6}});
  CHECK(c.frame_id == "lidar");

  std::stringstream empty;
  CHECK(read_lidar_bin(empty, "e.bin").empty());

  std::stringstream odd(floats({1, 2, 3, 4}) + "x");
  try {
    read_lidar_bin(odd, "odd.bin");
    FAIL("expected a load error");
  } catch (const LoadError& e) {
    CHECK(e.offset() == 16);
  }

  std::stringstream nan(floats({1, 2, 3, 4, 1, std::nanf(""), 3, 4}));
  try {
    read_lidar_bin(nan, "nan.bin");
    FAIL("expected a load error");
  } catch (const LoadError& e) {
    CHECK(e.offset() == 20);  // byte offset of the bad field
  }

  PointCloud w;
  w.points = {{1.5, -2, 3}};
  std::stringstream out;
  write_lidar_bin(out, w);
  CHECK(out.str() == floats({1.5f, -2, 3, 0}));
}

TEST_CASE("ply round trip and malformed input") {
  SeededRng rng(1);
  const PointCloud c = oracle::random_cloud(rng, 300, 20.0, "lidar");
  std::stringstream ss;
  write_ply(ss, c);
  const PointCloud back = read_ply(ss, "c.ply");
  REQUIRE(back.size() == c.size());
  CHECK(back.frame_id == "lidar");
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(std::abs(back.points[i].x - c.points[i].x) <= 1e-6 * std::max(1.0, std::abs(c.points[i].x)));
    CHECK(std::abs(back.points[i].y - c.points[i].y) <= 1e-6 * std::max(1.0, std::abs(c.points[i].y)));
    CHECK(std::abs(back.points[i].z - c.points[i].z) <= 1e-6 * std::max(1.0, std::abs(c.points[i].z)));
  }

  std::stringstream es;
  write_ply(es, PointCloud{});
  CHECK(es.str().find("element vertex 0") != std::string::npos);
  CHECK(read_ply(es).empty());

  std::stringstream shortfile("ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\n"
                              "property float z\nend_header\n1 2 3\n4 5 6\n");
  CHECK_THROWS_AS(read_ply(shortfile), LoadError);
  std::stringstream binary("ply\nformat binary_little_endian 1.0\nelement vertex 0\nend_header\n");
  CHECK_THROWS_AS(read_ply(binary), LoadError);
  std::stringstream garbage("not a ply\n");
  CHECK_THROWS_AS(read_ply(garbage), LoadError);
}

TEST_CASE("frame association by nearest stamp") {
  const auto a = associate_frames({0.0, 0.1, 0.2, 0.5}, {0.01, 0.12, 0.26, 0.3}, 0.05);
  CHECK(a.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});
  CHECK(a.dropped == 2);
  const auto tie = associate_frames({1.0}, {0.9, 1.1}, 0.2);
  CHECK(tie.pairs.front().second == 0);
  CHECK_THROWS_AS(associate_frames({0.0}, {1.0, 0.0}, 0.1), ConfigError);
}

TEST_CASE("ray casting through a box world") {
  BoxWorld w;
  w.room = {{-5, -5, -1}, {5, 5, 2}};
  w.objects.push_back({{2, -0.5, -1}, {3, 0.5, 1}});
  const auto rc = cast_ray(w, Eigen::Vector3d::Zero(), {1, 0, 0});
  CHECK(rc.first.surface == Surface::kObject);
  CHECK(rc.first.t == doctest::Approx(2.0));
  CHECK(rc.behind.surface == Surface::kWall);
  CHECK(rc.behind.t == doctest::Approx(5.0));
  CHECK(cast_ray(w, Eigen::Vector3d::Zero(), {0, 0, -1}).first.surface == Surface::kFloor);
  CHECK(cast_ray(w, Eigen::Vector3d::Zero(), {0, 0, 1}).first.t == doctest::Approx(2.0));
}

TEST_CASE("synthetic box world") {
  const PipelineConfig cfg = desk_config();
  const auto a = synth_boxworld(5, 3, cfg.sensors, cfg.synth);
  const auto b = synth_boxworld(5, 3, cfg.sensors, cfg.synth);
  const auto c = synth_boxworld(6, 1, cfg.sensors, cfg.synth);
  const RigidTransform r2l = cfg.sensors.extrinsic.radar_to_lidar();
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].record.lidar.points == b[i].record.lidar.points);
    CHECK(a[i].record.radar.points == b[i].record.radar.points);
    CHECK(a[i].radar_map.power == b[i].radar_map.power);
    CHECK(a[i].record.lidar.size() >= 10 * a[i].record.radar.size());
    CHECK(a[i].radar_ghost.size() == a[i].record.radar.size());
    std::size_t ghosts = 0;
    for (std::size_t k = 0; k < a[i].radar_ghost.size(); ++k) {
      if (!a[i].radar_ghost[k]) continue;
      ++ghosts;
      CHECK(cfg.sensors.fov.contains(to_spherical(r2l.apply(a[i].record.radar.points[k]))));
    }
    const double rate = static_cast<double>(ghosts) / static_cast<double>(a[i].record.radar.size());
    CHECK(rate == doctest::Approx(0.05).epsilon(0.2));
    // Boxes keep clear of the sensor.
    for (const auto& box : a[i].world.objects) {
      const double nx = std::max({0.0, box.lo.x(), -box.hi.x()});
      const double ny = std::max({0.0, box.lo.y(), -box.hi.y()});
      CHECK(std::hypot(nx, ny) >= 1.8 - 1e-9);
    }
  }
  CHECK(c[0].record.lidar.points != a[0].record.lidar.points);
  // A scene depends only on (seed, index).
  CHECK(synth_frame(5, 2, cfg.sensors, cfg.synth).record.lidar.points == a[2].record.lidar.points);
}

TEST_CASE("config parsing is fail-closed and round trips") {
  const PipelineConfig def = parse_config("");
  CHECK(def.sensors.lidar_height == 128);
  CHECK(def.sensors.lidar_width == 512);
  CHECK(def.sensors.radar_height == 64);
  CHECK(def.sensors.channels == 16);

  const PipelineConfig c = parse_config(
      "seed: 9\nsensors:\n  lidar_image: {height: 32, width: 128}\n  radar_image: {height: 16, width: 16}\n"
      "  channels: 4\n  slice_spacing: log\ncfar: {alpha: 0.001, window: range_azimuth}\ntrain: {steps: 7}\n");
  CHECK(c.seed == 9);
  CHECK(c.sensors.channels == 4);
  CHECK(c.sensors.spacing == SliceSpacing::kLog);
  CHECK(c.cfar.window == CfarWindow::kRangeAzimuth);
  CHECK(c.train.steps == 7);

  const PipelineConfig again = parse_config(to_yaml(c));
  CHECK(to_yaml(again) == to_yaml(c));
  CHECK(again.sensors.fov == c.sensors.fov);
  CHECK(again.sensors.extrinsic.translation == c.sensors.extrinsic.translation);

  CHECK_THROWS_AS(parse_config("sede: 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("sensors:\n  chanels: 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("train:\n  weights: {mse: 1, lpips: 2}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed: [1, 2]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("sensors: {slice_spacing: cubic}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("sensors: {channels: 0}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("sensors: {radar_image: {height: 8, width: 8}}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed: 1\n  bad: [\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("sensors:\n  radar_to_lidar: {rpy: [0, 0]}\n"), ConfigError);
}
