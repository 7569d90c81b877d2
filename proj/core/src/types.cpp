#include "radarsr/types.hpp"

#include <Eigen/Geometry>
#include <algorithm>

#include "radarsr/errors.hpp"

namespace radarsr {

namespace {
constexpr double kOrthoTol = 1e-9;
}

bool PointCloud::all_finite() const {
  return std::all_of(points.begin(), points.end(), [](const Point3& p) { return p.finite(); });
}

void require_same_frame(const PointCloud& a, const PointCloud& b, const char* context) {
  if (a.frame_id != b.frame_id) {
    throw ConfigError(std::string(context) + ": frame mismatch '" + a.frame_id + "' vs '" + b.frame_id + "'");
  }
}

Spherical to_spherical(const Point3& p) {
  Spherical s;
  s.r = p.norm();
  s.theta = std::atan2(p.y, p.x);
  s.phi = s.r > 0.0 ? std::acos(std::clamp(p.z / s.r, -1.0, 1.0)) : 0.0;
  return s;
}

Point3 from_spherical(const Spherical& s) {
  const double sp = std::sin(s.phi);
  return {s.r * sp * std::cos(s.theta), s.r * sp * std::sin(s.theta), s.r * std::cos(s.phi)};
}

void AngularFov::validate() const {
  if (!(theta_min < theta_max)) throw ConfigError("fov: theta_min must be < theta_max");
  if (!(phi_min < phi_max)) throw ConfigError("fov: phi_min must be < phi_max");
  if (!(r_min >= 0.0 && r_min < r_max)) throw ConfigError("fov: need 0 <= r_min < r_max");
  if (!std::isfinite(r_max)) throw ConfigError("fov: r_max must be finite");
}

void ImageGeometry::validate() const {
  if (height < 1 || width < 1) throw ConfigError("image geometry: width and height must be >= 1");
  fov.validate();
}

RigidTransform::RigidTransform() : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation,
                               std::string source_frame, std::string target_frame)
    : rotation_(rotation),
      translation_(translation),
      source_frame_(std::move(source_frame)),
      target_frame_(std::move(target_frame)) {
  if (!rotation_.allFinite() || !translation_.allFinite()) {
    throw ConfigError("rigid transform: non-finite entries");
  }
  const double ortho = (rotation_.transpose() * rotation_ - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kOrthoTol) throw ConfigError("rigid transform: rotation is not orthonormal");
  if (std::abs(rotation_.determinant() - 1.0) > kOrthoTol) {
    throw ConfigError("rigid transform: rotation determinant is not +1");
  }
}

RigidTransform RigidTransform::identity(std::string frame) {
  return RigidTransform(Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero(), frame, frame);
}

RigidTransform RigidTransform::from_rpy(double roll, double pitch, double yaw, const Eigen::Vector3d& translation,
                                        std::string source_frame, std::string target_frame) {
  const Eigen::Matrix3d r = (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
                             Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
                             Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
                                .toRotationMatrix();
  return RigidTransform(r, translation, std::move(source_frame), std::move(target_frame));
}

RigidTransform RigidTransform::inverse() const {
  const Eigen::Matrix3d rt = rotation_.transpose();
  return RigidTransform(rt, -(rt * translation_), target_frame_, source_frame_);
}

RigidTransform RigidTransform::after(const RigidTransform& first) const {
  if (!source_frame_.empty() && !first.target_frame_.empty() && source_frame_ != first.target_frame_) {
    throw ConfigError("rigid transform: cannot compose '" + first.target_frame_ + "' into '" + source_frame_ + "'");
  }
  return RigidTransform(rotation_ * first.rotation_, rotation_ * first.translation_ + translation_,
                        first.source_frame_, target_frame_);
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t) {
  if (!t.source_frame().empty() && cloud.frame_id != t.source_frame()) {
    throw ConfigError("apply_transform: cloud frame '" + cloud.frame_id + "' does not match transform source '" +
                      t.source_frame() + "'");
  }
  PointCloud out;
  out.frame_id = t.target_frame().empty() ? cloud.frame_id : t.target_frame();
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(t.apply(p));
  return out;
}

}  // namespace radarsr
