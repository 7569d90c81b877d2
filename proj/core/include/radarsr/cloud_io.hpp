#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "radarsr/types.hpp"

namespace radarsr {

/// Little-endian float32 records (x, y, z, intensity); intensity is discarded.
/// Rejects byte counts not divisible by 16 and non-finite coordinates.
PointCloud read_lidar_bin(const std::filesystem::path& path, const std::string& frame_id = "lidar");
PointCloud read_lidar_bin(std::istream& is, const std::string& name, const std::string& frame_id = "lidar");
/// Writes the same record layout with intensity 0.
void write_lidar_bin(const std::filesystem::path& path, const PointCloud& cloud);
void write_lidar_bin(std::ostream& os, const PointCloud& cloud);

/// ASCII PLY with a single "vertex" element and float x, y, z properties.
void write_ply(std::ostream& os, const PointCloud& cloud);
void write_ply(const std::filesystem::path& path, const PointCloud& cloud);
/// Accepts any vertex property list containing x, y and z. Errors carry the 1-based line number.
PointCloud read_ply(std::istream& is, const std::string& name = "<stream>", const std::string& frame_id = {});
PointCloud read_ply(const std::filesystem::path& path, const std::string& frame_id = {});

}  // namespace radarsr
