#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "radarsr/tensor.hpp"
#include "radarsr/types.hpp"

namespace radarsr {

/// l_h x l_w grid of ranges (meters) with an explicit validity mask. Values under
/// invalid pixels are unspecified and never read.
class RangeImage {
 public:
  RangeImage() = default;
  explicit RangeImage(const ImageGeometry& geometry);

  const ImageGeometry& geometry() const { return geometry_; }
  int height() const { return geometry_.height; }
  int width() const { return geometry_.width; }

  bool valid(int row, int col) const { return valid_[idx(row, col)] != 0; }
  double range(int row, int col) const { return ranges_[idx(row, col)]; }
  /// Marks the pixel valid. `r` must lie within the geometry's range window.
  void set(int row, int col, double r);
  void clear(int row, int col) { valid_[idx(row, col)] = 0; }

  std::size_t valid_count() const;
  const std::vector<double>& ranges() const { return ranges_; }
  const std::vector<std::uint8_t>& mask() const { return valid_; }

  friend bool operator==(const RangeImage&, const RangeImage&) = default;

 private:
  std::size_t idx(int row, int col) const { return static_cast<std::size_t>(row) * geometry_.width + col; }

  ImageGeometry geometry_;
  std::vector<double> ranges_;
  std::vector<std::uint8_t> valid_;
};

struct PixelIndex {
  int row = 0;  // i_phi
  int col = 0;  // i_theta
};

/// Image coordinates of a direction: floor((theta - theta_min) * l_w / r_theta) and
/// floor((phi - phi_min) * l_h / r_phi), clamped into the grid against rounding at
/// the open upper edge. Caller checks FOV membership first.
PixelIndex pixel_of(const Spherical& s, const ImageGeometry& geom);
/// Bin-center direction of a pixel.
Spherical pixel_center(int row, int col, const ImageGeometry& geom);

struct ProjectionStats {
  std::size_t input_points = 0;
  std::size_t in_fov = 0;
  std::size_t dropped = 0;     // outside the angular or range window
  std::size_t collisions = 0;  // in-FOV points that hit an occupied pixel
};

struct Projection {
  RangeImage image;
  ProjectionStats stats;
};

/// Point cloud -> range image; pixel collisions keep the nearest range.
Projection project(const PointCloud& cloud, const ImageGeometry& geom);

/// One point per valid pixel at the bin-center direction and stored range.
PointCloud backproject(const RangeImage& img, const std::string& frame_id = {});

enum class SliceSpacing { kUniform, kLog };

/// C range images over one geometry, channel k holding points with range in
/// [bounds[k], bounds[k+1]) (the last channel also includes r_max).
struct MultiChannelRangeImage {
  std::vector<RangeImage> channels;
  std::vector<double> slice_bounds;

  int channel_count() const { return static_cast<int>(channels.size()); }
  const ImageGeometry& geometry() const { return channels.front().geometry(); }
  std::size_t valid_count() const;

  friend bool operator==(const MultiChannelRangeImage&, const MultiChannelRangeImage&) = default;
};

/// Slice boundaries over [r_min, r_max]. Log spacing places bound k at
/// r_min + (1 + span)^(k/C) - 1, finer near the sensor.
std::vector<double> slice_bounds(const AngularFov& fov, int channels, SliceSpacing spacing = SliceSpacing::kUniform);
/// Index of the slice containing `r`. Requires r within [bounds.front(), bounds.back()].
int slice_of(const std::vector<double>& bounds, double r);

struct MultiChannelProjection {
  MultiChannelRangeImage image;
  ProjectionStats stats;
};

MultiChannelProjection slice_multichannel(const PointCloud& cloud, const ImageGeometry& geom, int channels,
                                          SliceSpacing spacing = SliceSpacing::kUniform);

/// Union of every channel's back-projected points.
PointCloud backproject(const MultiChannelRangeImage& img, const std::string& frame_id = {});

/// (valid pixels summed over channels) / (in-FOV points). 1.0 when no point is in the FOV.
double retention_ratio(const PointCloud& cloud, const ImageGeometry& geom, int channels,
                       SliceSpacing spacing = SliceSpacing::kUniform);

/// Range values mapped affinely [r_min, r_max] -> [-1, 1]; invalid entries hold `fill`.
struct NormalizedImage {
  ImageGeometry geometry;
  Tensor values;                     // C x l_h x l_w
  std::vector<std::uint8_t> valid;   // same layout as values

  int channels() const { return values.channels(); }
};

inline constexpr double kDefaultInvalidFill = -1.0;

double normalize_range(double r, const AngularFov& fov);
double denormalize_range(double v, const AngularFov& fov);

NormalizedImage normalize(const RangeImage& img, double fill = kDefaultInvalidFill);
NormalizedImage normalize(const MultiChannelRangeImage& img, double fill = kDefaultInvalidFill);
/// Inverse of normalize() for a single-channel image; invalid pixels stay invalid.
RangeImage denormalize(const NormalizedImage& n, const AngularFov& fov);
/// Reads a generated single-channel tensor: a pixel is valid when its normalized
/// value exceeds `valid_threshold`; ranges are clamped into the window.
RangeImage from_prediction(const Tensor& values, const ImageGeometry& geom, double valid_threshold);

}  // namespace radarsr
