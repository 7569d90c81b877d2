#include "radarsr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radarsr/errors.hpp"
#include "radarsr/rng.hpp"

namespace radarsr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSensorHeight = 1.0;
constexpr double kLidarRangeNoise = 0.01;

Eigen::Vector3d direction(double theta, double phi) {
  return {std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi)};
}

// Slab test. Returns (t_in, t_out) or an empty interval.
std::pair<double, double> slab(const Box& b, const Eigen::Vector3d& o, const Eigen::Vector3d& d) {
  double t0 = -kInf;
  double t1 = kInf;
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < b.lo[a] || o[a] > b.hi[a]) return {kInf, -kInf};
      continue;
    }
    double ta = (b.lo[a] - o[a]) / d[a];
    double tb = (b.hi[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  return {t0, t1};
}

RayHit room_exit(const Box& room, const Eigen::Vector3d& o, const Eigen::Vector3d& d) {
  RayHit hit{kInf, Surface::kNone, 0.0};
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) continue;
    const double t = ((d[a] > 0.0 ? room.hi[a] : room.lo[a]) - o[a]) / d[a];
    if (t > 0.0 && t < hit.t) {
      hit.t = t;
      hit.surface = a < 2 ? Surface::kWall : (d[a] > 0.0 ? Surface::kCeiling : Surface::kFloor);
    }
  }
  return hit;
}

// Nearest object entry strictly after `after`.
RayHit next_object(const BoxWorld& w, const Eigen::Vector3d& o, const Eigen::Vector3d& d, double after) {
  RayHit hit{kInf, Surface::kNone, 0.0};
  for (const auto& b : w.objects) {
    const auto [t0, t1] = slab(b, o, d);
    if (t1 < t0 || t0 <= after) continue;
    if (t0 < hit.t) hit = {t0, Surface::kObject, t1};
  }
  return hit;
}

RayHit first_from(const BoxWorld& w, const Eigen::Vector3d& o, const Eigen::Vector3d& d, double after) {
  const RayHit wall = room_exit(w.room, o, d);
  const RayHit obj = next_object(w, o, d, after);
  return obj.t < wall.t ? obj : wall;
}

Box random_object(SeededRng& rng, const Box& room, double floor_z) {
  for (;;) {
    const double sx = rng.uniform(0.4, 1.2);
    const double sy = rng.uniform(0.4, 1.2);
    const double h = rng.uniform(0.5, 1.8);
    const double cx = rng.uniform(1.8, room.hi.x() - 0.6 - sx / 2);
    const double cy = rng.uniform(room.lo.y() + 0.6 + sy / 2, room.hi.y() - 0.6 - sy / 2);
    // The whole footprint keeps clear of the sensor.
    const double nx = std::max(0.0, std::abs(cx) - sx / 2);
    const double ny = std::max(0.0, std::abs(cy) - sy / 2);
    if (std::hypot(nx, ny) < 1.8) continue;
    return {{cx - sx / 2, cy - sy / 2, floor_z}, {cx + sx / 2, cy + sy / 2, floor_z + h}};
  }
}

}  // namespace

FrameAssociation associate_frames(const std::vector<double>& lidar_stamps, const std::vector<double>& radar_stamps,
                                  double max_skew) {
  if (!std::is_sorted(radar_stamps.begin(), radar_stamps.end())) {
    throw ConfigError("associate_frames: radar stamps must be sorted");
  }
  FrameAssociation out;
  for (std::size_t i = 0; i < lidar_stamps.size(); ++i) {
    const double t = lidar_stamps[i];
    const auto it = std::lower_bound(radar_stamps.begin(), radar_stamps.end(), t);
    std::size_t best = radar_stamps.size();
    double gap = kInf;
    if (it != radar_stamps.begin()) {
      best = static_cast<std::size_t>(it - radar_stamps.begin()) - 1;
      gap = t - radar_stamps[best];
    }
    if (it != radar_stamps.end() && *it - t < gap) {
      best = static_cast<std::size_t>(it - radar_stamps.begin());
      gap = *it - t;
    }
    if (best < radar_stamps.size() && gap <= max_skew) {
      out.pairs.emplace_back(i, best);
    } else {
      ++out.dropped;
    }
  }
  return out;
}

RayCast cast_ray(const BoxWorld& world, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir) {
  RayCast rc;
  rc.first = first_from(world, origin, dir, 0.0);
  if (rc.first.surface == Surface::kObject) rc.behind = first_from(world, origin, dir, rc.first.exit_t);
  return rc;
}

BoxWorld random_box_world(SeededRng& rng) {
  BoxWorld w;
  const double floor_z = -kSensorHeight;
  w.room.lo = {-rng.uniform(2.0, 5.0), -rng.uniform(2.5, 6.0), floor_z};
  w.room.hi = {rng.uniform(5.0, 11.0), rng.uniform(2.5, 6.0), rng.uniform(1.2, 2.0)};
  const int n_boxes = 2 + static_cast<int>(rng.below(4));
  for (int i = 0; i < n_boxes; ++i) w.objects.push_back(random_object(rng, w.room, floor_z));
  // Bench: a thin slab at seat height.
  Box bench = random_object(rng, w.room, floor_z);
  const double seat = floor_z + rng.uniform(0.4, 0.6);
  bench.lo.z() = seat;
  bench.hi.z() = seat + 0.08;
  w.objects.push_back(bench);
  return w;
}

PowerMapGeometry radar_map_geometry(const SensorConfig& sensors, const SynthParams& params) {
  const auto& f = sensors.fov;
  PowerMapGeometry g;
  g.range_bins = params.map_range_bins;
  g.azimuth_bins = sensors.radar_width;
  g.elevation_bins = sensors.radar_height;
  g.range_min = f.r_min;
  g.range_res = (f.r_max - f.r_min) / params.map_range_bins;
  g.azimuth_min = f.theta_min;
  g.azimuth_res = f.theta_span() / sensors.radar_width;
  g.elevation_min = f.phi_min;
  g.elevation_res = f.phi_span() / sensors.radar_height;
  return g;
}

SynthFrame synth_frame(std::uint64_t seed, int index, const SensorConfig& sensors, const SynthParams& params) {
  SeededRng rng(SeededRng::derive(seed, static_cast<std::uint64_t>(index)));
  SeededRng world_rng = rng.child(1);
  SeededRng lidar_rng = rng.child(2);
  SeededRng radar_rng = rng.child(3);

  SynthFrame out;
  out.world = random_box_world(world_rng);
  const auto& fov = sensors.fov;
  auto& rec = out.record;
  rec.timestamp = index * params.frame_period;
  rec.radar_timestamp = rec.timestamp + params.radar_time_offset;
  rec.pose = RigidTransform(Eigen::Matrix3d::Identity(), Eigen::Vector3d(0.0, 0.0, kSensorHeight), "lidar", "world");
  rec.lidar.frame_id = "lidar";
  rec.radar.frame_id = "radar";

  // LiDAR: a jittered grid over a window a little wider than the shared FOV.
  const double th_margin = params.lidar_azimuth_margin * fov.theta_span();
  const double ph_margin = 0.1 * fov.phi_span();
  const double th0 = fov.theta_min - th_margin;
  const double ph0 = fov.phi_min - ph_margin;
  const double th_span = fov.theta_span() + 2 * th_margin;
  const double ph_span = fov.phi_span() + 2 * ph_margin;
  const auto n_th = static_cast<int>(std::ceil(sensors.lidar_width * params.lidar_oversample * th_span / fov.theta_span()));
  const auto n_ph = static_cast<int>(std::ceil(sensors.lidar_height * params.lidar_oversample * ph_span / fov.phi_span()));
  const Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  for (int i = 0; i < n_ph; ++i) {
    for (int j = 0; j < n_th; ++j) {
      const double phi = ph0 + (i + lidar_rng.uniform()) * ph_span / n_ph;
      const double theta = th0 + (j + lidar_rng.uniform()) * th_span / n_th;
      const Eigen::Vector3d d = direction(theta, phi);
      const RayHit hit = cast_ray(out.world, origin, d).first;
      ++out.lidar_rays;
      if (hit.surface == Surface::kNone) continue;
      const double r = hit.t + kLidarRangeNoise * lidar_rng.normal();
      rec.lidar.points.push_back(Point3::from(d * r));
    }
  }

  // Radar: random rays in its own frame; floor and ceiling give no usable return.
  const RigidTransform r2l = sensors.extrinsic.radar_to_lidar();
  const RigidTransform l2r = r2l.inverse();
  const Eigen::Vector3d r_origin = r2l.translation();
  out.radar_rays = static_cast<std::size_t>(std::llround(params.radar_ray_fraction * static_cast<double>(out.lidar_rays)));
  std::vector<PointTarget> targets;
  auto emit = [&](const Eigen::Vector3d& dir_radar, double range, bool ghost, double snr_db) {
    rec.radar.points.push_back(Point3::from(dir_radar * range));
    out.radar_ghost.push_back(ghost);
    targets.push_back({range, std::atan2(dir_radar.y(), dir_radar.x()), std::acos(std::clamp(dir_radar.z(), -1.0, 1.0)),
                       snr_db});
  };
  for (std::size_t k = 0; k < out.radar_rays; ++k) {
    const double theta = radar_rng.uniform(fov.theta_min, fov.theta_max);
    const double phi = radar_rng.uniform(fov.phi_min, fov.phi_max);
    const Eigen::Vector3d d_radar = direction(theta, phi);
    const Eigen::Vector3d d = r2l.rotation() * d_radar;
    const RayCast rc = cast_ray(out.world, r_origin, d);
    const double jitter = params.range_jitter * radar_rng.normal();
    const bool penetrate = radar_rng.bernoulli(params.penetration_prob);
    const double jitter2 = params.range_jitter * radar_rng.normal();
    const double snr = radar_rng.uniform(15.0, 25.0);
    auto usable = [](const RayHit& h) { return h.surface == Surface::kObject || h.surface == Surface::kWall; };
    if (!usable(rc.first)) continue;
    emit(d_radar, std::max(0.0, rc.first.t + jitter), false, snr);
    if (penetrate && usable(rc.behind)) emit(d_radar, std::max(0.0, rc.behind.t + jitter2), false, snr - 6.0);
  }
  // Ghosts make up `ghost_rate` of the final cloud and are drawn inside the shared FOV
  // as seen from the LiDAR frame.
  const std::size_t n_real = rec.radar.points.size();
  const auto n_ghost = static_cast<std::size_t>(
      std::llround(params.ghost_rate / (1.0 - params.ghost_rate) * static_cast<double>(n_real)));
  for (std::size_t k = 0; k < n_ghost; ++k) {
    Spherical s;
    s.theta = radar_rng.uniform(fov.theta_min, fov.theta_max);
    s.phi = radar_rng.uniform(fov.phi_min, fov.phi_max);
    s.r = radar_rng.uniform(fov.r_min, fov.r_max);
    const Point3 in_radar = l2r.apply(from_spherical(s));
    const Eigen::Vector3d v = in_radar.vec();
    emit(v.normalized(), v.norm(), true, radar_rng.uniform(10.0, 15.0));
  }

  // Power map from every return that falls inside the map extent.
  const PowerMapGeometry g = radar_map_geometry(sensors, params);
  std::vector<PointTarget> inside;
  for (const auto& t : targets) {
    const double fr = (t.r - g.range_min) / g.range_res;
    const double fa = (t.theta - g.azimuth_min) / g.azimuth_res;
    const double fe = (t.phi - g.elevation_min) / g.elevation_res;
    if (fr >= 0.0 && fr < g.range_bins && fa >= 0.0 && fa < g.azimuth_bins && fe >= 0.0 && fe < g.elevation_bins) {
      inside.push_back(t);
    }
  }
  out.radar_map = synth_power_map(g, inside, rng.child(4).next_u64());
  return out;
}

std::vector<SynthFrame> synth_boxworld(std::uint64_t seed, int n_scenes, const SensorConfig& sensors,
                                       const SynthParams& params) {
  std::vector<SynthFrame> out;
  out.reserve(static_cast<std::size_t>(std::max(0, n_scenes)));
  for (int i = 0; i < n_scenes; ++i) out.push_back(synth_frame(seed, i, sensors, params));
  return out;
}

}  // namespace radarsr
