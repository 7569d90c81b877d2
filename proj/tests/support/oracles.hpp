#pragma once

// Reference implementations used only by tests. Each one follows the textbook
// definition with no indexing structure, so agreement with the library is evidence
// rather than a tautology.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "radarsr/cfar.hpp"
#include "radarsr/rng.hpp"
#include "radarsr/types.hpp"

namespace oracle {

using radarsr::PointCloud;
using radarsr::Point3;

std::vector<double> nn_distances(const PointCloud& a, const PointCloud& b);
double chamfer(const PointCloud& a, const PointCloud& b);
double mhd(const PointCloud& a, const PointCloud& b);

struct FScore {
  double precision;
  double recall;
  double fscore;
};
FScore fscore(const PointCloud& pred, const PointCloud& truth, double tau);

/// Nearest index by exhaustive scan, ties to the lower index.
std::size_t nearest_index(const std::vector<Point3>& pts, const Point3& q);

/// DBSCAN through connected components of the core graph (union-find). Labels are
/// numbered by each component's lowest core index; a border point takes the lowest
/// label among the components of its core neighbors.
std::vector<int> dbscan(const PointCloud& cloud, double eps, int min_pts);

struct Cell {
  int r, a, e;
  bool operator==(const Cell&) const = default;
};
/// Per-cell OS-CFAR: enumerate every map cell, keep those inside the training ring,
/// sort fully and threshold the ceil(k N)-th smallest.
std::vector<Cell> os_cfar(const radarsr::PowerMap& map, const radarsr::CfarParams& p);

/// log N(x; mu, var I) for flat vectors.
double gaussian_log_density(const std::vector<double>& x, const std::vector<double>& mu, double var);

/// Central difference of f at x along coordinate i.
double central_difference(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                          std::size_t i, double h);

double rel_err(double a, double b, double floor = 1e-12);

PointCloud random_cloud(radarsr::SeededRng& rng, std::size_t n, double extent, const std::string& frame = {});

}  // namespace oracle
