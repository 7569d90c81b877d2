#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace radarsr {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  Eigen::Vector3d vec() const { return {x, y, z}; }
  static Point3 from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

  friend bool operator==(const Point3&, const Point3&) = default;
};

/// Ordered points in a named sensor frame. Transforms and filters keep order.
struct PointCloud {
  std::vector<Point3> points;
  std::string frame_id;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool all_finite() const;
};

/// Throws ConfigError when two clouds that must share a frame do not.
void require_same_frame(const PointCloud& a, const PointCloud& b, const char* context);

/// Spherical coordinates: azimuth theta = atan2(y, x) in (-pi, pi], polar angle phi
/// = arccos(z / r) in [0, pi] measured from +Z.
struct Spherical {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

Spherical to_spherical(const Point3& p);
Point3 from_spherical(const Spherical& s);

/// Angular/radial window. Angles are closed at the minimum and open at the maximum
/// so that floor() binning never produces an index equal to the bin count; range is
/// closed on both ends.
struct AngularFov {
  double theta_min = 0.0;
  double theta_max = 0.0;
  double phi_min = 0.0;
  double phi_max = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;

  double theta_span() const { return theta_max - theta_min; }
  double phi_span() const { return phi_max - phi_min; }
  double r_span() const { return r_max - r_min; }

  bool contains_angles(const Spherical& s) const {
    return s.theta >= theta_min && s.theta < theta_max && s.phi >= phi_min && s.phi < phi_max;
  }
  bool contains_range(double r) const { return r >= r_min && r <= r_max; }
  bool contains(const Spherical& s) const { return contains_range(s.r) && contains_angles(s); }

  /// Throws ConfigError unless theta_min < theta_max, phi_min < phi_max, 0 <= r_min < r_max.
  void validate() const;

  friend bool operator==(const AngularFov&, const AngularFov&) = default;
};

struct ImageGeometry {
  int height = 0;  // l_h, elevation bins
  int width = 0;   // l_w, azimuth bins
  AngularFov fov;

  std::size_t pixels() const { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }
  double theta_bin() const { return fov.theta_span() / width; }
  double phi_bin() const { return fov.phi_span() / height; }
  void validate() const;

  friend bool operator==(const ImageGeometry&, const ImageGeometry&) = default;
};

/// Rotation + translation mapping points from `source_frame` into `target_frame`.
/// Construction rejects rotations that are not orthonormal with det +1 (tol 1e-9).
class RigidTransform {
 public:
  RigidTransform();
  RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation,
                 std::string source_frame = {}, std::string target_frame = {});

  static RigidTransform identity(std::string frame = {});
  /// Intrinsic Z-Y-X (yaw, pitch, roll) Euler angles in radians.
  static RigidTransform from_rpy(double roll, double pitch, double yaw, const Eigen::Vector3d& translation,
                                 std::string source_frame = {}, std::string target_frame = {});

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  const std::string& source_frame() const { return source_frame_; }
  const std::string& target_frame() const { return target_frame_; }

  Point3 apply(const Point3& p) const { return Point3::from(rotation_ * p.vec() + translation_); }
  RigidTransform inverse() const;
  /// Returns `this` after `first`: x -> this(first(x)).
  RigidTransform after(const RigidTransform& first) const;

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
  std::string source_frame_;
  std::string target_frame_;
};

/// p' = R p + t for every point, order preserved. The cloud's frame must equal the
/// transform's source frame when the latter is set; the result carries the target frame.
PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t);

}  // namespace radarsr
