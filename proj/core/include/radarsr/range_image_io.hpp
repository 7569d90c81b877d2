#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "radarsr/projection.hpp"

namespace radarsr {

// Range-image stack file (".rimg"), all fields little-endian:
//
//   offset  size      field
//   0       4         magic "RIMG"
//   4       4         u32 version (1: uniform slice bounds, 2: explicit bounds follow)
//   8       4         u32 l_h
//   12      4         u32 l_w
//   16      4         u32 C (channel count)
//   20      48        f64 theta_min, theta_max, phi_min, phi_max, r_min, r_max
//   68      8*(C+1)   f64 slice bounds (version 2 only)
//   ...     4*C*l_h*l_w  f32 ranges, channel-major then row-major; -1.0 marks invalid
//
// Ranges are stored as float32; a single RangeImage is written as C = 1.
inline constexpr char kRangeImageMagic[5] = "RIMG";

void write_range_image(std::ostream& os, const MultiChannelRangeImage& img);
void write_range_image(const std::filesystem::path& path, const MultiChannelRangeImage& img);
void write_range_image(const std::filesystem::path& path, const RangeImage& img);

MultiChannelRangeImage read_range_image(std::istream& is, const std::string& name = "<stream>");
MultiChannelRangeImage read_range_image(const std::filesystem::path& path);

/// Wraps one image as a C = 1 stack with bounds [r_min, r_max].
MultiChannelRangeImage as_stack(const RangeImage& img);

}  // namespace radarsr
