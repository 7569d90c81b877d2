#include <benchmark/benchmark.h>

#include "radarsr/cfar.hpp"

using namespace radarsr;

namespace {

PowerMap noise_map(int nr, int na) {
  PowerMapGeometry g;
  g.range_bins = nr;
  g.azimuth_bins = na;
  g.range_res = 0.1;
  g.azimuth_min = -1.0;
  g.azimuth_res = 2.0 / na;
  g.elevation_min = 1.5;
  g.elevation_res = 0.1;
  return synth_power_map(g, {{3.0, 0.1, 1.55, 20.0}}, 5);
}

void BM_OsCfarRange(benchmark::State& state) {
  const PowerMap m = noise_map(static_cast<int>(state.range(0)), 64);
  for (auto _ : state) benchmark::DoNotOptimize(os_cfar(m, CfarParams{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.power.size()));
}
BENCHMARK(BM_OsCfarRange)->Arg(64)->Arg(256);

void BM_OsCfarRangeAzimuth(benchmark::State& state) {
  const PowerMap m = noise_map(128, 64);
  CfarParams p;
  p.guard = 1;
  p.train = 4;
  p.window = CfarWindow::kRangeAzimuth;
  for (auto _ : state) benchmark::DoNotOptimize(os_cfar(m, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.power.size()));
}
BENCHMARK(BM_OsCfarRangeAzimuth);

}  // namespace
