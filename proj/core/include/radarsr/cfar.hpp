#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "radarsr/types.hpp"

namespace radarsr {

/// Bin layout of a range-azimuth(-elevation) power map. Elevation is the polar angle
/// phi from +Z, like everywhere else; a 2-D map has one elevation bin.
struct PowerMapGeometry {
  int range_bins = 0;
  int azimuth_bins = 0;
  int elevation_bins = 1;
  double range_min = 0.0;
  double range_res = 0.0;      // meters / bin
  double azimuth_min = 0.0;
  double azimuth_res = 0.0;    // radians / bin
  double elevation_min = 0.0;
  double elevation_res = 0.0;  // radians / bin

  std::size_t cells() const {
    return static_cast<std::size_t>(range_bins) * azimuth_bins * elevation_bins;
  }
  /// Range is the fastest axis, then azimuth, then elevation.
  std::size_t index(int r, int a, int e) const {
    return (static_cast<std::size_t>(e) * azimuth_bins + a) * range_bins + r;
  }
  Spherical bin_center(int r, int a, int e) const;
  void validate() const;

  friend bool operator==(const PowerMapGeometry&, const PowerMapGeometry&) = default;
};

/// Linear, non-negative cell powers.
struct PowerMap {
  PowerMapGeometry geometry;
  std::vector<double> power;

  double at(int r, int a, int e = 0) const { return power[geometry.index(r, a, e)]; }
  void validate() const;
};

enum class CfarWindow {
  kRange,         // training cells along the range axis only
  kRangeAzimuth,  // square ring in the range-azimuth plane
};

struct CfarParams {
  int guard = 2;         // cells on each side
  int train = 12;        // cells on each side beyond the guard band
  double k_rank = 0.75;  // order statistic as a fraction of the training set
  double alpha = 5.0;    // threshold scale on the noise estimate
  CfarWindow window = CfarWindow::kRange;

  void validate() const;
  /// alpha = 1e-3: admits almost every cell with non-zero power.
  static CfarParams near_zero();
};

struct Detection {
  int range_bin = 0;
  int azimuth_bin = 0;
  int elevation_bin = 0;
  double power = 0.0;
  Spherical position;  // bin center
};

/// Order-statistic CFAR. Windows that run past the map edge are truncated; a cell with
/// no training cells at all is a configuration error.
std::vector<Detection> os_cfar(const PowerMap& map, const CfarParams& params);

PointCloud detections_to_cloud(const std::vector<Detection>& dets, const std::string& frame_id = "radar");

struct PointTarget {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double snr_db = 0.0;
};

/// Exponential(1) noise in every cell plus each target's linear SNR added to the
/// single cell containing it.
PowerMap synth_power_map(const PowerMapGeometry& geom, const std::vector<PointTarget>& targets,
                         std::uint64_t noise_seed);

// Power-map file (".pwm"), little-endian:
//   "PWMP" | u32 version = 1 | u32 range_bins | u32 azimuth_bins | u32 elevation_bins |
//   f64 range_min, range_res, azimuth_min, azimuth_res, elevation_min, elevation_res |
//   f32 power[cells], range fastest, then azimuth, then elevation.
inline constexpr char kPowerMapMagic[5] = "PWMP";

void write_power_map(std::ostream& os, const PowerMap& map);
void write_power_map(const std::filesystem::path& path, const PowerMap& map);
PowerMap read_power_map(std::istream& is, const std::string& name = "<stream>");
PowerMap read_power_map(const std::filesystem::path& path);

}  // namespace radarsr
