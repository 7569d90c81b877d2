#include "radarsr/cloud_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "radarsr/detail/binary.hpp"
#include "radarsr/errors.hpp"

namespace radarsr {

PointCloud read_lidar_bin(std::istream& is, const std::string& name, const std::string& frame_id) {
  std::vector<char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  constexpr std::size_t kStride = 16;
  if (bytes.size() % kStride != 0) {
    throw LoadError(name, bytes.size() - bytes.size() % kStride, "file size is not a multiple of 16 bytes");
  }
  std::istringstream ss(std::string(bytes.begin(), bytes.end()));
  detail::BinaryReader r(ss, name);
  PointCloud cloud;
  cloud.frame_id = frame_id;
  cloud.points.reserve(bytes.size() / kStride);
  for (std::size_t i = 0; i < bytes.size() / kStride; ++i) {
    float v[4];
    for (auto& x : v) {
      const auto at = r.offset();
      x = r.f32();
      if (!std::isfinite(x)) throw LoadError(name, at, "non-finite value");
    }
    cloud.points.push_back({v[0], v[1], v[2]});
  }
  return cloud;
}

PointCloud read_lidar_bin(const std::filesystem::path& path, const std::string& frame_id) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw LoadError(path.string(), 0, "cannot open");
  return read_lidar_bin(is, path.string(), frame_id);
}

void write_lidar_bin(std::ostream& os, const PointCloud& cloud) {
  detail::BinaryWriter w(os);
  for (const auto& p : cloud.points) {
    w.f32(static_cast<float>(p.x));
    w.f32(static_cast<float>(p.y));
    w.f32(static_cast<float>(p.z));
    w.f32(0.0f);
  }
}

void write_lidar_bin(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw RuntimeError("cannot open " + path.string() + " for writing");
  write_lidar_bin(os, cloud);
  if (!os) throw RuntimeError("write failed: " + path.string());
}

void write_ply(std::ostream& os, const PointCloud& cloud) {
  if (!cloud.all_finite()) throw ConfigError("write_ply: non-finite point");
  os << "ply\nformat ascii 1.0\n";
  if (!cloud.frame_id.empty()) os << "comment frame " << cloud.frame_id << "\n";
  os << "element vertex " << cloud.size() << "\n"
     << "property float x\nproperty float y\nproperty float z\nend_header\n";
  char buf[96];
  for (const auto& p : cloud.points) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", static_cast<double>(static_cast<float>(p.x)),
                  static_cast<double>(static_cast<float>(p.y)), static_cast<double>(static_cast<float>(p.z)));
    os << buf;
  }
}

void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream os(path);
  if (!os) throw RuntimeError("cannot open " + path.string() + " for writing");
  write_ply(os, cloud);
  if (!os) throw RuntimeError("write failed: " + path.string());
}

PointCloud read_ply(std::istream& is, const std::string& name, const std::string& frame_id) {
  std::string line;
  std::uint64_t lineno = 0;
  auto next = [&]() -> bool {
    if (!std::getline(is, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  auto fail = [&](const std::string& what) -> LoadError { return LoadError(name, lineno, what); };

  if (!next() || line != "ply") throw fail("missing 'ply' signature");
  if (!next() || line != "format ascii 1.0") throw fail("only 'format ascii 1.0' is supported");

  long long vertex_count = -1;
  std::vector<std::string> props;
  PointCloud cloud;
  cloud.frame_id = frame_id;
  bool in_vertex = false;
  while (true) {
    if (!next()) throw fail("unterminated header");
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "end_header") break;
    if (kw == "comment" || kw == "obj_info") {
      std::string tag, value;
      if ((ls >> tag >> value) && tag == "frame" && frame_id.empty()) cloud.frame_id = value;
      continue;
    }
    if (kw == "element") {
      std::string ename;
      long long count = -1;
      if (!(ls >> ename >> count) || count < 0) throw fail("malformed element line");
      if (ename != "vertex") throw fail("unsupported element '" + ename + "'");
      if (vertex_count >= 0) throw fail("duplicate vertex element");
      vertex_count = count;
      in_vertex = true;
      continue;
    }
    if (kw == "property") {
      if (!in_vertex) throw fail("property outside the vertex element");
      std::string type, pname;
      if (!(ls >> type >> pname)) throw fail("malformed property line");
      if (type == "list") throw fail("list properties are not supported");
      props.push_back(pname);
      continue;
    }
    throw fail("unexpected header line '" + line + "'");
  }
  if (vertex_count < 0) throw fail("missing vertex element");
  auto find = [&](const char* p) -> std::size_t {
    for (std::size_t i = 0; i < props.size(); ++i) {
      if (props[i] == p) return i;
    }
    throw fail(std::string("missing property ") + p);
  };
  const std::size_t ix = find("x"), iy = find("y"), iz = find("z");

  cloud.points.reserve(static_cast<std::size_t>(vertex_count));
  std::vector<double> vals(props.size());
  for (long long v = 0; v < vertex_count; ++v) {
    if (!next()) throw fail("expected " + std::to_string(vertex_count) + " vertices, found " + std::to_string(v));
    std::istringstream ls(line);
    for (auto& x : vals) {
      if (!(ls >> x)) throw fail("too few values in vertex line");
    }
    std::string extra;
    if (ls >> extra) throw fail("too many values in vertex line");
    Point3 p{vals[ix], vals[iy], vals[iz]};
    if (!p.finite()) throw fail("non-finite vertex");
    cloud.points.push_back(p);
  }
  while (next()) {
    if (line.find_first_not_of(" \t") != std::string::npos) throw fail("data after the last vertex");
  }
  return cloud;
}

PointCloud read_ply(const std::filesystem::path& path, const std::string& frame_id) {
  std::ifstream is(path);
  if (!is) throw LoadError(path.string(), 0, "cannot open");
  return read_ply(is, path.string(), frame_id);
}

}  // namespace radarsr
