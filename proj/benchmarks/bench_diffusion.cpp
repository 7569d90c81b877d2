#include <benchmark/benchmark.h>

#include "radarsr/diffusion.hpp"
#include "radarsr/model.hpp"

using namespace radarsr;

namespace {

void BM_HeunGaussian(benchmark::State& state) {
  const GaussianAnalyticDenoiser d(Tensor(1, 32, 128, 0.2), 0.25);
  const NoiseSchedule s = make_schedule(0.002, 80.0, 7.0, static_cast<int>(state.range(0)));
  SeededRng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(heun_sample(d, s, 1, 32, 128, {}, rng));
}
BENCHMARK(BM_HeunGaussian)->Arg(8)->Arg(32);

void BM_ToyDenoiserForward(benchmark::State& state) {
  ToyDenoiserConfig c;
  c.height = static_cast<int>(state.range(0));
  c.width = 4 * c.height;
  c.seed = 3;
  const ToyDenoiser m(c);
  const Tensor x(1, c.height, c.width, 0.1);
  const Tensor cond(c.cond_channels, c.cond_height(), c.cond_width(), -0.5);
  for (auto _ : state) benchmark::DoNotOptimize(m.denoise(x, 1.0, cond));
}
BENCHMARK(BM_ToyDenoiserForward)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_TrainingGradient(benchmark::State& state) {
  ToyDenoiserConfig c;
  c.seed = 4;
  const ToyDenoiser m(c);
  std::vector<TrainingExample> ex(1);
  ex[0].target = Tensor(1, c.height, c.width, 0.3);
  ex[0].valid.assign(ex[0].target.size(), 1);
  ex[0].condition = Tensor(c.cond_channels, c.cond_height(), c.cond_width(), -0.5);
  std::vector<BatchItem> batch(4);
  for (auto& b : batch) b.draw.noise = Tensor(1, c.height, c.width, 0.5);
  const GradientPyramidExtractor extractor;
  for (auto _ : state) benchmark::DoNotOptimize(gradients(m, ex, batch, LossWeights{}, extractor));
}
BENCHMARK(BM_TrainingGradient)->Unit(benchmark::kMillisecond);

}  // namespace
