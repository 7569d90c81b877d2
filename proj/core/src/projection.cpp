#include "radarsr/projection.hpp"

#include <algorithm>
#include <cmath>

#include "radarsr/errors.hpp"

namespace radarsr {

RangeImage::RangeImage(const ImageGeometry& geometry) : geometry_(geometry) {
  geometry_.validate();
  ranges_.assign(geometry_.pixels(), 0.0);
  valid_.assign(geometry_.pixels(), 0);
}

void RangeImage::set(int row, int col, double r) {
  const std::size_t i = idx(row, col);
  ranges_[i] = r;
  valid_[i] = 1;
}

std::size_t RangeImage::valid_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

PixelIndex pixel_of(const Spherical& s, const ImageGeometry& geom) {
  const auto& f = geom.fov;
  const int col = static_cast<int>(std::floor((s.theta - f.theta_min) * geom.width / f.theta_span()));
  const int row = static_cast<int>(std::floor((s.phi - f.phi_min) * geom.height / f.phi_span()));
  return {std::clamp(row, 0, geom.height - 1), std::clamp(col, 0, geom.width - 1)};
}

Spherical pixel_center(int row, int col, const ImageGeometry& geom) {
  const auto& f = geom.fov;
  Spherical s;
  s.theta = f.theta_min + (col + 0.5) * f.theta_span() / geom.width;
  s.phi = f.phi_min + (row + 0.5) * f.phi_span() / geom.height;
  return s;
}

namespace {

// Nearest-wins write; returns true on collision.
bool splat(RangeImage& img, const PixelIndex& px, double r) {
  if (img.valid(px.row, px.col)) {
    if (r < img.range(px.row, px.col)) img.set(px.row, px.col, r);
    return true;
  }
  img.set(px.row, px.col, r);
  return false;
}

}  // namespace

Projection project(const PointCloud& cloud, const ImageGeometry& geom) {
  geom.validate();
  Projection out{RangeImage(geom), {}};
  out.stats.input_points = cloud.size();
  for (const auto& p : cloud.points) {
    if (!p.finite()) throw ConfigError("project: non-finite point");
    const Spherical s = to_spherical(p);
    if (!geom.fov.contains(s)) {
      ++out.stats.dropped;
      continue;
    }
    ++out.stats.in_fov;
    if (splat(out.image, pixel_of(s, geom), s.r)) ++out.stats.collisions;
  }
  return out;
}

PointCloud backproject(const RangeImage& img, const std::string& frame_id) {
  PointCloud cloud;
  cloud.frame_id = frame_id;
  cloud.points.reserve(img.valid_count());
  for (int row = 0; row < img.height(); ++row) {
    for (int col = 0; col < img.width(); ++col) {
      if (!img.valid(row, col)) continue;
      Spherical s = pixel_center(row, col, img.geometry());
      s.r = img.range(row, col);
      cloud.points.push_back(from_spherical(s));
    }
  }
  return cloud;
}

std::size_t MultiChannelRangeImage::valid_count() const {
  std::size_t n = 0;
  for (const auto& c : channels) n += c.valid_count();
  return n;
}

std::vector<double> slice_bounds(const AngularFov& fov, int channels, SliceSpacing spacing) {
  if (channels < 1) throw ConfigError("slice_multichannel: channel count must be >= 1");
  fov.validate();
  std::vector<double> b(channels + 1);
  for (int k = 0; k <= channels; ++k) {
    const double t = static_cast<double>(k) / channels;
    b[k] = spacing == SliceSpacing::kUniform ? fov.r_min + t * fov.r_span()
                                             : fov.r_min + (std::pow(1.0 + fov.r_span(), t) - 1.0);
  }
  b.front() = fov.r_min;
  b.back() = fov.r_max;
  return b;
}

int slice_of(const std::vector<double>& bounds, double r) {
  const auto it = std::upper_bound(bounds.begin(), bounds.end(), r);
  const int k = static_cast<int>(it - bounds.begin()) - 1;
  return std::clamp(k, 0, static_cast<int>(bounds.size()) - 2);
}

MultiChannelProjection slice_multichannel(const PointCloud& cloud, const ImageGeometry& geom, int channels,
                                          SliceSpacing spacing) {
  geom.validate();
  MultiChannelProjection out;
  out.image.slice_bounds = slice_bounds(geom.fov, channels, spacing);
  out.image.channels.assign(channels, RangeImage(geom));
  out.stats.input_points = cloud.size();
  for (const auto& p : cloud.points) {
    if (!p.finite()) throw ConfigError("slice_multichannel: non-finite point");
    const Spherical s = to_spherical(p);
    if (!geom.fov.contains(s)) {
      ++out.stats.dropped;
      continue;
    }
    ++out.stats.in_fov;
    const int k = slice_of(out.image.slice_bounds, s.r);
    if (splat(out.image.channels[k], pixel_of(s, geom), s.r)) ++out.stats.collisions;
  }
  return out;
}

PointCloud backproject(const MultiChannelRangeImage& img, const std::string& frame_id) {
  PointCloud cloud;
  cloud.frame_id = frame_id;
  for (const auto& ch : img.channels) {
    auto part = backproject(ch, frame_id);
    cloud.points.insert(cloud.points.end(), part.points.begin(), part.points.end());
  }
  return cloud;
}

double retention_ratio(const PointCloud& cloud, const ImageGeometry& geom, int channels, SliceSpacing spacing) {
  const auto proj = slice_multichannel(cloud, geom, channels, spacing);
  if (proj.stats.in_fov == 0) return 1.0;
  return static_cast<double>(proj.image.valid_count()) / static_cast<double>(proj.stats.in_fov);
}

double normalize_range(double r, const AngularFov& fov) { return 2.0 * (r - fov.r_min) / fov.r_span() - 1.0; }

double denormalize_range(double v, const AngularFov& fov) { return fov.r_min + (v + 1.0) * 0.5 * fov.r_span(); }

namespace {

void write_channel(const RangeImage& img, double fill, NormalizedImage& out, int c) {
  const auto& fov = img.geometry().fov;
  for (int row = 0; row < img.height(); ++row) {
    for (int col = 0; col < img.width(); ++col) {
      const std::size_t i = (static_cast<std::size_t>(c) * img.height() + row) * img.width() + col;
      if (img.valid(row, col)) {
        out.values[i] = normalize_range(img.range(row, col), fov);
        out.valid[i] = 1;
      } else {
        out.values[i] = fill;
        out.valid[i] = 0;
      }
    }
  }
}

}  // namespace

NormalizedImage normalize(const RangeImage& img, double fill) {
  NormalizedImage out{img.geometry(), Tensor(1, img.height(), img.width()), {}};
  out.valid.assign(out.values.size(), 0);
  write_channel(img, fill, out, 0);
  return out;
}

NormalizedImage normalize(const MultiChannelRangeImage& img, double fill) {
  if (img.channels.empty()) throw ConfigError("normalize: empty channel stack");
  const auto& g = img.geometry();
  NormalizedImage out{g, Tensor(img.channel_count(), g.height, g.width), {}};
  out.valid.assign(out.values.size(), 0);
  for (int c = 0; c < img.channel_count(); ++c) write_channel(img.channels[c], fill, out, c);
  return out;
}

RangeImage denormalize(const NormalizedImage& n, const AngularFov& fov) {
  if (n.channels() != 1) throw ConfigError("denormalize: expected a single-channel image");
  ImageGeometry g = n.geometry;
  g.fov = fov;
  RangeImage img(g);
  for (int row = 0; row < g.height; ++row) {
    for (int col = 0; col < g.width; ++col) {
      const std::size_t i = static_cast<std::size_t>(row) * g.width + col;
      if (n.valid[i]) img.set(row, col, std::clamp(denormalize_range(n.values[i], fov), fov.r_min, fov.r_max));
    }
  }
  return img;
}

RangeImage from_prediction(const Tensor& values, const ImageGeometry& geom, double valid_threshold) {
  if (values.channels() != 1 || values.height() != geom.height || values.width() != geom.width) {
    throw ConfigError("from_prediction: tensor shape does not match geometry");
  }
  RangeImage img(geom);
  for (int row = 0; row < geom.height; ++row) {
    for (int col = 0; col < geom.width; ++col) {
      const double v = values.at(0, row, col);
      if (std::isfinite(v) && v > valid_threshold) {
        img.set(row, col, std::clamp(denormalize_range(v, geom.fov), geom.fov.r_min, geom.fov.r_max));
      }
    }
  }
  return img;
}

}  // namespace radarsr
