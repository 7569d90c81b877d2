#include <benchmark/benchmark.h>

#include "radarsr/kdtree.hpp"
#include "radarsr/metrics.hpp"
#include "radarsr/rng.hpp"

using namespace radarsr;

namespace {

PointCloud random_cloud(std::uint64_t seed, std::size_t n) {
  SeededRng rng(seed);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) c.points.push_back({rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-1, 1)});
  return c;
}

void BM_Chamfer(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PointCloud a = random_cloud(1, n), b = random_cloud(2, n);
  for (auto _ : state) benchmark::DoNotOptimize(chamfer(a, b));
  state.SetItemsProcessed(state.iterations() * 2 * state.range(0));
}
BENCHMARK(BM_Chamfer)->Arg(1000)->Arg(10000)->Arg(60000);

void BM_Evaluate(benchmark::State& state) {
  const PointCloud a = random_cloud(3, 20000), b = random_cloud(4, 20000);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_clouds(a, b, 0.25));
}
BENCHMARK(BM_Evaluate);

}  // namespace
