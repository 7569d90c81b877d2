#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>

#include "radarsr/cfar.hpp"
#include "radarsr/model.hpp"
#include "radarsr/preprocess.hpp"
#include "radarsr/projection.hpp"
#include "radarsr/types.hpp"

namespace radarsr {

struct ExtrinsicConfig {
  Eigen::Vector3d translation = Eigen::Vector3d(0.05, 0.0, -0.08);
  Eigen::Vector3d rpy = Eigen::Vector3d(0.0, 0.0, 0.02);

  /// radar -> lidar transform.
  RigidTransform radar_to_lidar() const;
};

struct SensorConfig {
  // Shared field of view in the LiDAR frame: 120 deg azimuth, +/-15 deg elevation, 0.5-12.5 m.
  AngularFov fov{-std::numbers::pi / 3.0, std::numbers::pi / 3.0, std::numbers::pi / 2.0 - std::numbers::pi / 12.0,
                 std::numbers::pi / 2.0 + std::numbers::pi / 12.0, 0.5, 12.5};
  int lidar_height = 128;
  int lidar_width = 512;
  int radar_height = 64;
  int radar_width = 64;
  int channels = 16;
  SliceSpacing spacing = SliceSpacing::kUniform;
  ExtrinsicConfig extrinsic;
  double max_time_skew = 0.05;  // seconds

  ImageGeometry lidar_geometry() const { return {lidar_height, lidar_width, fov}; }
  ImageGeometry radar_geometry() const { return {radar_height, radar_width, fov}; }
};

struct SynthParams {
  int frames = 96;
  int lidar_oversample = 2;          // rays per image pixel along each axis
  double lidar_azimuth_margin = 0.25;  // extra azimuth coverage beyond the shared FOV, fraction of span
  double radar_ray_fraction = 1.0 / 30.0;  // radar rays relative to LiDAR rays
  double range_jitter = 0.1;         // meters, radar range noise std
  double ghost_rate = 0.05;          // fraction of radar points that are ghosts
  double penetration_prob = 0.3;     // chance a radar ray also reports the surface behind
  double frame_period = 0.1;         // seconds
  double radar_time_offset = 0.005;  // seconds
  int map_range_bins = 64;
};

enum class RadarSource { kCloud, kPowerMap };

struct PreprocessParams {
  GroundRemovalParams ground;
  RadarGuidedFilterParams filter;
  RadarSource radar_source = RadarSource::kCloud;
};

struct ScheduleParams {
  double sigma_min = 0.002;
  double sigma_max = 80.0;
  double rho = 7.0;
  int steps = 32;
};

struct SampleParams {
  double valid_threshold = -0.9;  // normalized value above which a generated pixel is a return
};

struct MetricParams {
  double tau = 0.25;
  bool write_cdf = true;
};

struct PipelineConfig {
  std::uint64_t seed = 7;
  SensorConfig sensors;
  SynthParams synth;
  PreprocessParams preprocess;
  CfarParams cfar;
  ScheduleParams schedule;
  ToyDenoiserConfig model;  // height/width/cond shape are derived from `sensors`
  TrainConfig train;
  SampleParams sample;
  MetricParams metrics;

  /// Cross-checks every section; throws ConfigError.
  void validate() const;
  /// Model config with the image shapes filled in from the sensor section.
  ToyDenoiserConfig model_config() const;
};

/// Parses YAML text. Unknown keys anywhere are ConfigErrors; missing keys keep defaults.
PipelineConfig parse_config(const std::string& yaml_text);
PipelineConfig load_config(const std::filesystem::path& path);
/// Full effective configuration as YAML; parse_config(to_yaml(c)) reproduces c.
std::string to_yaml(const PipelineConfig& config);

}  // namespace radarsr
