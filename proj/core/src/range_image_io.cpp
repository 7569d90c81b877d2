#include "radarsr/range_image_io.hpp"

#include <cmath>
#include <fstream>

#include "radarsr/detail/binary.hpp"

namespace radarsr {

namespace {

constexpr std::uint32_t kUniformBounds = 1;
constexpr std::uint32_t kExplicitBounds = 2;
constexpr double kInvalid = -1.0;

bool bounds_are_uniform(const MultiChannelRangeImage& img) {
  const auto expected = slice_bounds(img.geometry().fov, img.channel_count(), SliceSpacing::kUniform);
  return expected == img.slice_bounds;
}

}  // namespace

MultiChannelRangeImage as_stack(const RangeImage& img) {
  return MultiChannelRangeImage{{img}, {img.geometry().fov.r_min, img.geometry().fov.r_max}};
}

void write_range_image(std::ostream& os, const MultiChannelRangeImage& img) {
  if (img.channels.empty()) throw ConfigError("write_range_image: empty stack");
  const auto& g = img.geometry();
  const bool uniform = bounds_are_uniform(img);
  detail::BinaryWriter w(os);
  w.bytes(kRangeImageMagic, 4);
  w.u32(uniform ? kUniformBounds : kExplicitBounds);
  w.u32(static_cast<std::uint32_t>(g.height));
  w.u32(static_cast<std::uint32_t>(g.width));
  w.u32(static_cast<std::uint32_t>(img.channel_count()));
  for (double v : {g.fov.theta_min, g.fov.theta_max, g.fov.phi_min, g.fov.phi_max, g.fov.r_min, g.fov.r_max}) w.f64(v);
  if (!uniform) {
    for (double b : img.slice_bounds) w.f64(b);
  }
  for (const auto& ch : img.channels) {
    if (!(ch.geometry() == g)) throw ConfigError("write_range_image: channels disagree on geometry");
    for (int row = 0; row < g.height; ++row) {
      for (int col = 0; col < g.width; ++col) {
        w.f32(static_cast<float>(ch.valid(row, col) ? ch.range(row, col) : kInvalid));
      }
    }
  }
}

void write_range_image(const std::filesystem::path& path, const MultiChannelRangeImage& img) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw RuntimeError("cannot open " + path.string() + " for writing");
  write_range_image(os, img);
  if (!os) throw RuntimeError("write failed: " + path.string());
}

void write_range_image(const std::filesystem::path& path, const RangeImage& img) {
  write_range_image(path, as_stack(img));
}

MultiChannelRangeImage read_range_image(std::istream& is, const std::string& name) {
  detail::BinaryReader r(is, name);
  r.expect_magic(kRangeImageMagic);
  const std::uint32_t version = r.u32();
  if (version != kUniformBounds && version != kExplicitBounds) r.fail("unsupported version " + std::to_string(version));
  ImageGeometry g;
  g.height = static_cast<int>(r.u32());
  g.width = static_cast<int>(r.u32());
  const std::uint32_t channels = r.u32();
  if (g.height < 1 || g.width < 1 || channels < 1 || channels > 4096) r.fail("bad dimensions");
  g.fov.theta_min = r.f64();
  g.fov.theta_max = r.f64();
  g.fov.phi_min = r.f64();
  g.fov.phi_max = r.f64();
  g.fov.r_min = r.f64();
  g.fov.r_max = r.f64();
  try {
    g.validate();
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }

  MultiChannelRangeImage img;
  if (version == kExplicitBounds) {
    img.slice_bounds.resize(channels + 1);
    for (auto& b : img.slice_bounds) b = r.f64();
  } else {
    img.slice_bounds = slice_bounds(g.fov, static_cast<int>(channels));
  }
  img.channels.assign(channels, RangeImage(g));
  for (auto& ch : img.channels) {
    for (int row = 0; row < g.height; ++row) {
      for (int col = 0; col < g.width; ++col) {
        const std::uint64_t at = r.offset();
        const float v = r.f32();
        if (v == static_cast<float>(kInvalid)) continue;
        if (!std::isfinite(v) || v < 0.0f) throw LoadError(name, at, "invalid range value");
        ch.set(row, col, v);
      }
    }
  }
  r.expect_eof();
  return img;
}

MultiChannelRangeImage read_range_image(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw LoadError(path.string(), 0, "cannot open");
  return read_range_image(is, path.string());
}

}  // namespace radarsr
