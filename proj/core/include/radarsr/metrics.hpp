#pragma once

#include <iosfwd>
#include <vector>

#include "radarsr/types.hpp"

namespace radarsr {

/// Exact nearest-neighbor distance from every point of `a` to `b` (k-d tree over b).
/// Throws ConfigError when b is empty.
std::vector<double> nn_distances(const PointCloud& a, const PointCloud& b);

/// mean(a -> b) + mean(b -> a), meters.
double chamfer(const PointCloud& a, const PointCloud& b);
/// max(mean(a -> b), mean(b -> a)), the Dubuisson-Jain modified Hausdorff distance.
double mhd(const PointCloud& a, const PointCloud& b);

struct FScore {
  double precision = 0.0;  // percent
  double recall = 0.0;     // percent
  double fscore = 0.0;     // percent
};

/// Precision: predicted points within tau of the truth; recall: truth points within tau
/// of the prediction.
FScore fscore(const PointCloud& predicted, const PointCloud& truth, double tau);

struct MetricReport {
  double cd = 0.0;
  double mhd = 0.0;
  double fscore = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::vector<double> pred_to_truth;
  std::vector<double> truth_to_pred;
};

MetricReport evaluate_clouds(const PointCloud& predicted, const PointCloud& truth, double tau = 0.25);

struct CdfPoint {
  double distance = 0.0;
  double fraction = 0.0;
};

/// Empirical CDF: one entry per distinct distance, fraction of samples <= it.
std::vector<CdfPoint> empirical_cdf(std::vector<double> distances);
/// Two whitespace-separated columns "distance fraction", one row per entry.
void write_cdf(std::ostream& os, const std::vector<CdfPoint>& cdf);

}  // namespace radarsr
