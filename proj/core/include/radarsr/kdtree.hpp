#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "radarsr/types.hpp"

namespace radarsr {

/// Exact static 3-d tree over a point set (median splits, leaf buckets).
/// Queries return the same distances a brute-force scan would: the squared
/// distance expression is evaluated identically and ties resolve to the lower index.
class KdTree {
 public:
  explicit KdTree(std::vector<Point3> points);

  std::size_t size() const { return points_.size(); }
  const std::vector<Point3>& points() const { return points_; }

  struct Neighbor {
    std::size_t index = 0;
    double squared_distance = 0.0;
  };
  /// Nearest point. Tree must be non-empty.
  Neighbor nearest(const Point3& q) const;
  /// Indices of all points with squared distance <= radius^2, ascending.
  std::vector<std::size_t> radius(const Point3& q, double radius) const;

 private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    int axis = -1;
    double split = 0.0;
  };

  int build(std::uint32_t begin, std::uint32_t end, int depth);
  void nearest_rec(int node, const Point3& q, Neighbor& best) const;
  void radius_rec(int node, const Point3& q, double r2, std::vector<std::size_t>& out) const;

  std::vector<Point3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

/// Squared Euclidean distance, the one expression shared by the tree and brute force.
inline double squared_distance(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace radarsr
