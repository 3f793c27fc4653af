#include <benchmark/benchmark.h>

#include <random>

#include "vizcap/chart.hpp"

namespace {

void BM_RenderScatter(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 10);
  vizcap::ChartSpec spec;
  spec.title = "x VS y";
  spec.x_label = "x";
  spec.y_label = "y";
  for (int i = 0; i < state.range(0); ++i) spec.points.push_back({u(rng), u(rng)});
  vizcap::RegressionResult fit;
  fit.intercept = 1;
  fit.slope = 0.5;
  spec.analysis = fit;
  for (auto _ : state) benchmark::DoNotOptimize(vizcap::RenderScatter(spec));
}
BENCHMARK(BM_RenderScatter)->Arg(100)->Arg(2000);

}  // namespace
