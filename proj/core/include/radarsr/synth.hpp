#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "radarsr/cfar.hpp"
#include "radarsr/config.hpp"
#include "radarsr/types.hpp"

namespace radarsr {

/// One time-aligned sensor pair. Clouds stay in their own sensor frames.
struct FrameRecord {
  double timestamp = 0.0;        // LiDAR stamp, seconds
  double radar_timestamp = 0.0;  // stamp of the associated radar sweep
  PointCloud lidar;              // frame "lidar"
  PointCloud radar;              // frame "radar"
  RigidTransform pose;           // lidar -> world
};

struct FrameAssociation {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (lidar index, radar index)
  std::size_t dropped = 0;                                  // LiDAR stamps with no radar sweep within max_skew
};

/// Pairs every LiDAR stamp with the nearest radar stamp (earlier one on ties) when the
/// gap is at most `max_skew`. Radar stamps must be sorted ascending.
FrameAssociation associate_frames(const std::vector<double>& lidar_stamps, const std::vector<double>& radar_stamps,
                                  double max_skew);

/// Axis-aligned box, used for room contents.
struct Box {
  Eigen::Vector3d lo;
  Eigen::Vector3d hi;
};

/// Room in the LiDAR frame: the sensor sits at the origin, `floor_z` below it.
struct BoxWorld {
  Box room;
  std::vector<Box> objects;  // floor boxes followed by the bench slab
};

enum class Surface { kNone, kObject, kWall, kFloor, kCeiling };

struct RayHit {
  double t = 0.0;
  Surface surface = Surface::kNone;
  double exit_t = 0.0;  // where the ray leaves the object that was hit (objects only)
};

/// First surface along origin + t * dir (dir unit length), and the first surface behind
/// the object that was hit, if any.
struct RayCast {
  RayHit first;
  RayHit behind;
};

RayCast cast_ray(const BoxWorld& world, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir);

BoxWorld random_box_world(SeededRng& rng);

struct SynthFrame {
  FrameRecord record;
  BoxWorld world;
  std::vector<bool> radar_ghost;  // parallel to record.radar.points
  PowerMap radar_map;             // radar-frame range/azimuth/elevation power
  std::size_t lidar_rays = 0;
  std::size_t radar_rays = 0;
};

/// Scene `index` of the dataset for `seed`; scenes are independent of each other.
SynthFrame synth_frame(std::uint64_t seed, int index, const SensorConfig& sensors, const SynthParams& params);

std::vector<SynthFrame> synth_boxworld(std::uint64_t seed, int n_scenes, const SensorConfig& sensors,
                                       const SynthParams& params);

/// Power-map geometry covering the shared FOV in the radar frame.
PowerMapGeometry radar_map_geometry(const SensorConfig& sensors, const SynthParams& params);

}  // namespace radarsr
