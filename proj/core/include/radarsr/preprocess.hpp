#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "radarsr/types.hpp"

namespace radarsr {

/// Keeps points inside the FOV window (angles closed below, open above; range closed).
PointCloud shared_fov_crop(const PointCloud& cloud, const AngularFov& fov);

/// Plane n . p + d = 0 with unit normal n.
struct PlaneModel {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double offset = 0.0;

  double distance(const Point3& p) const { return std::abs(normal.dot(p.vec()) + offset); }
};

struct GroundRemovalParams {
  int iterations = 200;
  double dist_tol = 0.1;             // meters
  double angle_tol_deg = 15.0;       // normal cone around +/-Z
  double min_inlier_fraction = 0.05;  // of the input cloud
  bool flip_pass = true;             // second pass with Z negated removes the ceiling
  std::uint64_t seed = 0;
};

struct GroundRemoval {
  PointCloud cloud;
  std::optional<PlaneModel> ground;   // plane removed by the first pass
  std::optional<PlaneModel> ceiling;  // plane removed by the flipped pass, in the input frame
  std::size_t removed_ground = 0;
  std::size_t removed_ceiling = 0;
  bool too_few_points = false;  // fewer than 3 points; input returned unchanged
};

/// RANSAC removal of the lowest dominant near-horizontal plane, then the same
/// procedure on the Z-negated residual. A candidate plane only qualifies as ground
/// when it lies at or below the cloud's mean height, which is what makes the flip
/// pass find the ceiling rather than the floor.
GroundRemoval remove_ground_and_ceiling(const PointCloud& cloud, const GroundRemovalParams& params = {});

inline constexpr int kNoise = -1;

/// Per-point cluster labels 0..K-1, or kNoise.
struct ClusterLabels {
  std::vector<int> labels;
  int cluster_count = 0;
};

/// DBSCAN with Euclidean metric; a point's neighborhood includes itself. Clusters are
/// numbered in order of their lowest-index core point and a border point joins the
/// lowest-numbered cluster with a core point within eps.
ClusterLabels dbscan(const PointCloud& cloud, double eps, int min_pts);

struct RadarGuidedFilterParams {
  double eps = 0.5;
  int min_pts = 5;
};

/// Clusters LiDAR + radar jointly and keeps the LiDAR points whose cluster contains at
/// least one radar point. Both clouds must share a frame.
PointCloud radar_guided_filter(const PointCloud& lidar, const PointCloud& radar,
                               const RadarGuidedFilterParams& params = {});

}  // namespace radarsr
