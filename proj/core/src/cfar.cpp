#include "radarsr/cfar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "radarsr/detail/binary.hpp"
#include "radarsr/errors.hpp"
#include "radarsr/rng.hpp"

namespace radarsr {

Spherical PowerMapGeometry::bin_center(int r, int a, int e) const {
  return {range_min + (r + 0.5) * range_res, azimuth_min + (a + 0.5) * azimuth_res,
          elevation_min + (e + 0.5) * elevation_res};
}

void PowerMapGeometry::validate() const {
  if (range_bins < 1 || azimuth_bins < 1 || elevation_bins < 1) throw ConfigError("power map: bin counts must be >= 1");
  if (!(range_res > 0.0) || !(azimuth_res > 0.0) || !(elevation_res > 0.0)) {
    throw ConfigError("power map: resolutions must be positive");
  }
  if (range_min < 0.0) throw ConfigError("power map: range_min must be >= 0");
}

void PowerMap::validate() const {
  geometry.validate();
  if (power.size() != geometry.cells()) throw ConfigError("power map: cell count does not match geometry");
  for (double p : power) {
    if (!std::isfinite(p) || p < 0.0) throw ConfigError("power map: powers must be finite and non-negative");
  }
}

void CfarParams::validate() const {
  if (guard < 0) throw ConfigError("cfar: guard must be >= 0");
  if (train < 1) throw ConfigError("cfar: train must be >= 1");
  if (!(k_rank > 0.0 && k_rank <= 1.0)) throw ConfigError("cfar: k_rank must be in (0, 1]");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("cfar: alpha must be finite and >= 0");
}

CfarParams CfarParams::near_zero() {
  CfarParams p;
  p.alpha = 1e-3;
  return p;
}

namespace {

void gather_training(const PowerMap& map, const CfarParams& p, int r, int a, int e, std::vector<double>& out) {
  out.clear();
  const auto& g = map.geometry;
  const int reach = p.guard + p.train;
  if (p.window == CfarWindow::kRange) {
    for (int d = -reach; d <= reach; ++d) {
      if (std::abs(d) <= p.guard) continue;
      const int rr = r + d;
      if (rr < 0 || rr >= g.range_bins) continue;
      out.push_back(map.at(rr, a, e));
    }
    return;
  }
  for (int da = -reach; da <= reach; ++da) {
    const int aa = a + da;
    if (aa < 0 || aa >= g.azimuth_bins) continue;
    for (int dr = -reach; dr <= reach; ++dr) {
      if (std::abs(dr) <= p.guard && std::abs(da) <= p.guard) continue;
      const int rr = r + dr;
      if (rr < 0 || rr >= g.range_bins) continue;
      out.push_back(map.at(rr, aa, e));
    }
  }
}

}  // namespace

std::vector<Detection> os_cfar(const PowerMap& map, const CfarParams& params) {
  params.validate();
  map.validate();
  const auto& g = map.geometry;
  std::vector<Detection> dets;
  std::vector<double> train;
  for (int e = 0; e < g.elevation_bins; ++e) {
    for (int a = 0; a < g.azimuth_bins; ++a) {
      for (int r = 0; r < g.range_bins; ++r) {
        gather_training(map, params, r, a, e, train);
        if (train.empty()) throw ConfigError("cfar: window leaves a cell with no training cells");
        const auto n = train.size();
        const auto k = std::min(n - 1, static_cast<std::size_t>(std::max(1.0, std::ceil(params.k_rank * n))) - 1);
        std::nth_element(train.begin(), train.begin() + static_cast<std::ptrdiff_t>(k), train.end());
        const double noise = train[k];
        const double power = map.at(r, a, e);
        if (power > params.alpha * noise) dets.push_back({r, a, e, power, g.bin_center(r, a, e)});
      }
    }
  }
  return dets;
}

PointCloud detections_to_cloud(const std::vector<Detection>& dets, const std::string& frame_id) {
  PointCloud cloud;
  cloud.frame_id = frame_id;
  cloud.points.reserve(dets.size());
  for (const auto& d : dets) cloud.points.push_back(from_spherical(d.position));
  return cloud;
}

PowerMap synth_power_map(const PowerMapGeometry& geom, const std::vector<PointTarget>& targets,
                         std::uint64_t noise_seed) {
  geom.validate();
  PowerMap map{geom, std::vector<double>(geom.cells())};
  SeededRng rng(noise_seed);
  for (auto& p : map.power) p = rng.exponential();
  for (const auto& t : targets) {
    const double fr = (t.r - geom.range_min) / geom.range_res;
    const double fa = (t.theta - geom.azimuth_min) / geom.azimuth_res;
    const double fe = (t.phi - geom.elevation_min) / geom.elevation_res;
    if (!(fr >= 0.0 && fr < geom.range_bins && fa >= 0.0 && fa < geom.azimuth_bins && fe >= 0.0 &&
          fe < geom.elevation_bins)) {
      throw ConfigError("synth_power_map: target outside the map extent");
    }
    const auto i = geom.index(static_cast<int>(fr), static_cast<int>(fa), static_cast<int>(fe));
    map.power[i] += std::pow(10.0, t.snr_db / 10.0);
  }
  return map;
}

void write_power_map(std::ostream& os, const PowerMap& map) {
  map.validate();
  const auto& g = map.geometry;
  detail::BinaryWriter w(os);
  w.bytes(kPowerMapMagic, 4);
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(g.range_bins));
  w.u32(static_cast<std::uint32_t>(g.azimuth_bins));
  w.u32(static_cast<std::uint32_t>(g.elevation_bins));
  for (double v : {g.range_min, g.range_res, g.azimuth_min, g.azimuth_res, g.elevation_min, g.elevation_res}) w.f64(v);
  for (double p : map.power) w.f32(static_cast<float>(p));
}

void write_power_map(const std::filesystem::path& path, const PowerMap& map) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw RuntimeError("cannot open " + path.string() + " for writing");
  write_power_map(os, map);
  if (!os) throw RuntimeError("write failed: " + path.string());
}

PowerMap read_power_map(std::istream& is, const std::string& name) {
  detail::BinaryReader r(is, name);
  r.expect_magic(kPowerMapMagic);
  if (const auto v = r.u32(); v != 1) r.fail("unsupported version " + std::to_string(v));
  PowerMap map;
  auto& g = map.geometry;
  g.range_bins = static_cast<int>(r.u32());
  g.azimuth_bins = static_cast<int>(r.u32());
  g.elevation_bins = static_cast<int>(r.u32());
  g.range_min = r.f64();
  g.range_res = r.f64();
  g.azimuth_min = r.f64();
  g.azimuth_res = r.f64();
  g.elevation_min = r.f64();
  g.elevation_res = r.f64();
  try {
    g.validate();
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
  if (g.cells() > (std::size_t{1} << 30)) r.fail("map too large");
  map.power.resize(g.cells());
  for (auto& p : map.power) {
    const std::uint64_t at = r.offset();
    const float v = r.f32();
    if (!std::isfinite(v) || v < 0.0f) throw LoadError(name, at, "power must be finite and non-negative");
    p = v;
  }
  r.expect_eof();
  return map;
}

PowerMap read_power_map(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw LoadError(path.string(), 0, "cannot open");
  return read_power_map(is, path.string());
}

}  // namespace radarsr
