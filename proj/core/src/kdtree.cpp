#include "radarsr/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "radarsr/errors.hpp"

namespace radarsr {

namespace {
constexpr std::uint32_t kLeafSize = 8;

double coord(const Point3& p, int axis) { return axis == 0 ? p.x : (axis == 1 ? p.y : p.z); }
}  // namespace

KdTree::KdTree(std::vector<Point3> points) : points_(std::move(points)) {
  if (points_.size() > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("kdtree: too many points");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 1);
    build(0, static_cast<std::uint32_t>(points_.size()), 0);
  }
}

int KdTree::build(std::uint32_t begin, std::uint32_t end, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  // Split on the axis of largest extent.
  double lo[3] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
  double hi[3] = {-lo[0], -lo[1], -lo[2]};
  for (std::uint32_t i = begin; i < end; ++i) {
    for (int a = 0; a < 3; ++a) {
      const double v = coord(points_[order_[i]], a);
      lo[a] = std::min(lo[a], v);
      hi[a] = std::max(hi[a], v);
    }
  }
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  }
  if (hi[axis] - lo[axis] <= 0.0) return id;  // all coincident

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) { return coord(points_[a], axis) < coord(points_[b], axis); });
  const double split = coord(points_[order_[mid]], axis);

  nodes_[id].axis = axis;
  nodes_[id].split = split;
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

KdTree::Neighbor KdTree::nearest(const Point3& q) const {
  if (points_.empty()) throw ConfigError("kdtree: nearest() on empty tree");
  Neighbor best{std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity()};
  nearest_rec(0, q, best);
  return best;
}

void KdTree::nearest_rec(int id, const Point3& q, Neighbor& best) const {
  const Node& n = nodes_[id];
  if (n.axis < 0) {
    for (std::uint32_t i = n.begin; i < n.end; ++i) {
      const std::uint32_t idx = order_[i];
      const double d2 = squared_distance(q, points_[idx]);
      if (d2 < best.squared_distance || (d2 == best.squared_distance && idx < best.index)) {
        best = {idx, d2};
      }
    }
    return;
  }
  const double diff = coord(q, n.axis) - n.split;
  const int first = diff < 0.0 ? n.left : n.right;
  const int second = diff < 0.0 ? n.right : n.left;
  nearest_rec(first, q, best);
  // <= so that equal-distance points with lower indices on the far side are still visited.
  if (diff * diff <= best.squared_distance) nearest_rec(second, q, best);
}

std::vector<std::size_t> KdTree::radius(const Point3& q, double radius) const {
  std::vector<std::size_t> out;
  if (points_.empty()) return out;
  radius_rec(0, q, radius * radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree::radius_rec(int id, const Point3& q, double r2, std::vector<std::size_t>& out) const {
  const Node& n = nodes_[id];
  if (n.axis < 0) {
    for (std::uint32_t i = n.begin; i < n.end; ++i) {
      const std::uint32_t idx = order_[i];
      if (squared_distance(q, points_[idx]) <= r2) out.push_back(idx);
    }
    return;
  }
  const double diff = coord(q, n.axis) - n.split;
  if (diff <= 0.0 || diff * diff <= r2) radius_rec(n.left, q, r2, out);
  if (diff >= 0.0 || diff * diff <= r2) radius_rec(n.right, q, r2, out);
}

}  // namespace radarsr
