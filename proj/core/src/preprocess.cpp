#include "radarsr/preprocess.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "radarsr/errors.hpp"
#include "radarsr/kdtree.hpp"
#include "radarsr/rng.hpp"

namespace radarsr {

PointCloud shared_fov_crop(const PointCloud& cloud, const AngularFov& fov) {
  fov.validate();
  PointCloud out;
  out.frame_id = cloud.frame_id;
  for (const auto& p : cloud.points) {
    if (fov.contains(to_spherical(p))) out.points.push_back(p);
  }
  return out;
}

namespace {

struct PlaneFit {
  PlaneModel plane;
  std::vector<std::size_t> inliers;
};

std::vector<std::size_t> inliers_of(const std::vector<Point3>& pts, const PlaneModel& plane, double tol) {
  std::vector<std::size_t> in;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (plane.distance(pts[i]) <= tol) in.push_back(i);
  }
  return in;
}

double mean_height(const std::vector<Point3>& pts, const std::vector<std::size_t>& idx) {
  double s = 0.0;
  for (auto i : idx) s += pts[i].z;
  return s / static_cast<double>(idx.size());
}

std::optional<PlaneModel> least_squares_plane(const std::vector<Point3>& pts, const std::vector<std::size_t>& idx) {
  if (idx.size() < 3) return std::nullopt;
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (auto i : idx) c += pts[i].vec();
  c /= static_cast<double>(idx.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (auto i : idx) {
    const Eigen::Vector3d d = pts[i].vec() - c;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  Eigen::Vector3d n = es.eigenvectors().col(0);
  if (n.z() < 0.0) n = -n;
  return PlaneModel{n, -n.dot(c)};
}

// Lowest dominant near-horizontal plane, or nothing when no qualifying candidate
// reaches `min_inliers`.
std::optional<PlaneFit> fit_ground(const std::vector<Point3>& pts, std::size_t min_inliers,
                                   const GroundRemovalParams& params, SeededRng& rng) {
  const std::size_t n = pts.size();
  if (n < 3) return std::nullopt;
  const double cos_tol = std::cos(params.angle_tol_deg * std::numbers::pi / 180.0);
  double cloud_mean_z = 0.0;
  for (const auto& p : pts) cloud_mean_z += p.z;
  cloud_mean_z /= static_cast<double>(n);

  auto qualifies = [&](const PlaneModel& pl, const std::vector<std::size_t>& in) {
    return std::abs(pl.normal.z()) >= cos_tol && in.size() >= min_inliers && mean_height(pts, in) <= cloud_mean_z;
  };

  std::optional<PlaneFit> best;
  for (int it = 0; it < params.iterations; ++it) {
    const std::size_t a = rng.below(n);
    const std::size_t b = rng.below(n);
    const std::size_t c = rng.below(n);
    if (a == b || b == c || a == c) continue;
    Eigen::Vector3d nrm = (pts[b].vec() - pts[a].vec()).cross(pts[c].vec() - pts[a].vec());
    const double len = nrm.norm();
    if (len < 1e-12) continue;
    nrm /= len;
    if (std::abs(nrm.z()) < cos_tol) continue;
    if (nrm.z() < 0.0) nrm = -nrm;
    PlaneModel pl{nrm, -nrm.dot(pts[a].vec())};
    auto in = inliers_of(pts, pl, params.dist_tol);
    if (!qualifies(pl, in)) continue;
    if (!best || in.size() > best->inliers.size()) best = PlaneFit{pl, std::move(in)};
  }
  if (!best) return std::nullopt;

  // Refit on the inliers; keep the refinement only if it still qualifies and does not lose support.
  if (auto refined = least_squares_plane(pts, best->inliers)) {
    auto in = inliers_of(pts, *refined, params.dist_tol);
    if (qualifies(*refined, in) && in.size() >= best->inliers.size()) best = PlaneFit{*refined, std::move(in)};
  }
  return best;
}

std::vector<Point3> without(const std::vector<Point3>& pts, const std::vector<std::size_t>& drop) {
  std::vector<Point3> out;
  out.reserve(pts.size() - drop.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (k < drop.size() && drop[k] == i) {
      ++k;
      continue;
    }
    out.push_back(pts[i]);
  }
  return out;
}

}  // namespace

GroundRemoval remove_ground_and_ceiling(const PointCloud& cloud, const GroundRemovalParams& params) {
  if (params.iterations < 1 || params.dist_tol <= 0.0 || params.angle_tol_deg < 0.0 || params.angle_tol_deg > 90.0 ||
      params.min_inlier_fraction < 0.0 || params.min_inlier_fraction > 1.0) {
    throw ConfigError("remove_ground_and_ceiling: invalid parameters");
  }
  GroundRemoval out;
  out.cloud = cloud;
  if (cloud.size() < 3) {
    out.too_few_points = true;
    return out;
  }
  const auto min_inliers =
      std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(params.min_inlier_fraction * cloud.size())));
  SeededRng rng(params.seed);

  std::vector<Point3> pts = cloud.points;
  if (auto g = fit_ground(pts, min_inliers, params, rng)) {
    out.ground = g->plane;
    out.removed_ground = g->inliers.size();
    pts = without(pts, g->inliers);
  }
  if (params.flip_pass) {
    for (auto& p : pts) p.z = -p.z;
    if (auto c = fit_ground(pts, min_inliers, params, rng)) {
      PlaneModel unflipped = c->plane;
      unflipped.normal.z() = -unflipped.normal.z();
      out.ceiling = unflipped;
      out.removed_ceiling = c->inliers.size();
      pts = without(pts, c->inliers);
    }
    for (auto& p : pts) p.z = -p.z;
  }
  out.cloud.points = std::move(pts);
  return out;
}

ClusterLabels dbscan(const PointCloud& cloud, double eps, int min_pts) {
  if (!(eps > 0.0) || min_pts < 1) throw ConfigError("dbscan: need eps > 0 and min_pts >= 1");
  constexpr int kUnvisited = -2;
  const std::size_t n = cloud.size();
  ClusterLabels out;
  out.labels.assign(n, kUnvisited);
  if (n == 0) return out;

  const KdTree tree(cloud.points);
  const auto core_threshold = static_cast<std::size_t>(min_pts);
  int cluster = 0;
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (out.labels[i] != kUnvisited) continue;
    auto nb = tree.radius(cloud.points[i], eps);
    if (nb.size() < core_threshold) {
      out.labels[i] = kNoise;
      continue;
    }
    out.labels[i] = cluster;
    queue.assign(nb.begin(), nb.end());
    while (!queue.empty()) {
      const std::size_t j = queue.front();
      queue.pop_front();
      if (out.labels[j] == kNoise) out.labels[j] = cluster;  // border point
      if (out.labels[j] != kUnvisited) continue;
      out.labels[j] = cluster;
      auto nbj = tree.radius(cloud.points[j], eps);
      if (nbj.size() >= core_threshold) {
        for (auto k : nbj) {
          if (out.labels[k] == kUnvisited || out.labels[k] == kNoise) queue.push_back(k);
        }
      }
    }
    ++cluster;
  }
  out.cluster_count = cluster;
  return out;
}

PointCloud radar_guided_filter(const PointCloud& lidar, const PointCloud& radar, const RadarGuidedFilterParams& params) {
  require_same_frame(lidar, radar, "radar_guided_filter");
  PointCloud joint;
  joint.frame_id = lidar.frame_id;
  joint.points.reserve(lidar.size() + radar.size());
  joint.points.insert(joint.points.end(), lidar.points.begin(), lidar.points.end());
  joint.points.insert(joint.points.end(), radar.points.begin(), radar.points.end());

  const auto labels = dbscan(joint, params.eps, params.min_pts);
  std::vector<char> supported(labels.cluster_count, 0);
  for (std::size_t i = lidar.size(); i < joint.size(); ++i) {
    if (labels.labels[i] != kNoise) supported[labels.labels[i]] = 1;
  }
  PointCloud out;
  out.frame_id = lidar.frame_id;
  for (std::size_t i = 0; i < lidar.size(); ++i) {
    const int l = labels.labels[i];
    if (l != kNoise && supported[l]) out.points.push_back(lidar.points[i]);
  }
  return out;
}

}  // namespace radarsr
