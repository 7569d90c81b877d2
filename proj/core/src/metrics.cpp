#include "radarsr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "radarsr/errors.hpp"
#include "radarsr/kdtree.hpp"

namespace radarsr {

namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void require_nonempty(const PointCloud& a, const PointCloud& b, const char* what) {
  if (a.empty() || b.empty()) throw ConfigError(std::string(what) + ": empty point cloud");
}

double fraction_within(const std::vector<double>& d, double tau) {
  const auto n = std::count_if(d.begin(), d.end(), [tau](double x) { return x <= tau; });
  return static_cast<double>(n) / static_cast<double>(d.size());
}

FScore fscore_from(const std::vector<double>& p2t, const std::vector<double>& t2p, double tau) {
  const double p = fraction_within(p2t, tau);
  const double r = fraction_within(t2p, tau);
  const double f = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  return {100.0 * p, 100.0 * r, 100.0 * f};
}

}  // namespace

std::vector<double> nn_distances(const PointCloud& a, const PointCloud& b) {
  if (b.empty()) throw ConfigError("nn_distances: reference cloud is empty");
  const KdTree tree(b.points);
  std::vector<double> d;
  d.reserve(a.size());
  for (const auto& p : a.points) d.push_back(std::sqrt(tree.nearest(p).squared_distance));
  return d;
}

double chamfer(const PointCloud& a, const PointCloud& b) {
  require_nonempty(a, b, "chamfer");
  return mean(nn_distances(a, b)) + mean(nn_distances(b, a));
}

double mhd(const PointCloud& a, const PointCloud& b) {
  require_nonempty(a, b, "mhd");
  return std::max(mean(nn_distances(a, b)), mean(nn_distances(b, a)));
}

FScore fscore(const PointCloud& predicted, const PointCloud& truth, double tau) {
  require_nonempty(predicted, truth, "fscore");
  if (!(tau > 0.0)) throw ConfigError("fscore: tau must be > 0");
  return fscore_from(nn_distances(predicted, truth), nn_distances(truth, predicted), tau);
}

MetricReport evaluate_clouds(const PointCloud& predicted, const PointCloud& truth, double tau) {
  require_nonempty(predicted, truth, "evaluate");
  if (!(tau > 0.0)) throw ConfigError("evaluate: tau must be > 0");
  MetricReport r;
  r.pred_to_truth = nn_distances(predicted, truth);
  r.truth_to_pred = nn_distances(truth, predicted);
  const double fwd = mean(r.pred_to_truth);
  const double bwd = mean(r.truth_to_pred);
  r.cd = fwd + bwd;
  r.mhd = std::max(fwd, bwd);
  const auto f = fscore_from(r.pred_to_truth, r.truth_to_pred, tau);
  r.precision = f.precision;
  r.recall = f.recall;
  r.fscore = f.fscore;
  return r;
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> distances) {
  if (distances.empty()) throw ConfigError("cdf: no distances");
  std::sort(distances.begin(), distances.end());
  const double n = static_cast<double>(distances.size());
  std::vector<CdfPoint> out;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (i + 1 < distances.size() && distances[i + 1] == distances[i]) continue;
    out.push_back({distances[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

void write_cdf(std::ostream& os, const std::vector<CdfPoint>& cdf) {
  char buf[64];
  os << "# distance_m cumulative_fraction\n";
  for (const auto& c : cdf) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g\n", c.distance, c.fraction);
    os << buf;
  }
}

}  // namespace radarsr
