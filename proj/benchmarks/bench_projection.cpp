#include <benchmark/benchmark.h>

#include "radarsr/config.hpp"
#include "radarsr/projection.hpp"
#include "radarsr/rng.hpp"

using namespace radarsr;

namespace {

PointCloud cloud_in(const AngularFov& f, std::size_t n) {
  SeededRng rng(1);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.points.push_back(from_spherical({rng.uniform(f.r_min, f.r_max), rng.uniform(f.theta_min, f.theta_max),
                                       rng.uniform(f.phi_min, f.phi_max)}));
  }
  return c;
}

void BM_Project(benchmark::State& state) {
  const ImageGeometry g = SensorConfig{}.lidar_geometry();
  const PointCloud c = cloud_in(g.fov, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(project(c, g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Project)->Arg(1000)->Arg(100000);

void BM_SliceMultichannel(benchmark::State& state) {
  const ImageGeometry g = SensorConfig{}.lidar_geometry();
  const PointCloud c = cloud_in(g.fov, 100000);
  const int channels = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(slice_multichannel(c, g, channels));
}
BENCHMARK(BM_SliceMultichannel)->Arg(1)->Arg(16);

void BM_Backproject(benchmark::State& state) {
  const ImageGeometry g = SensorConfig{}.lidar_geometry();
  const RangeImage img = project(cloud_in(g.fov, 100000), g).image;
  for (auto _ : state) benchmark::DoNotOptimize(backproject(img));
}
BENCHMARK(BM_Backproject);

}  // namespace
