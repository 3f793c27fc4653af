#include <benchmark/benchmark.h>

#include <random>

#include "vizcap/analysis.hpp"

namespace {

using vizcap::Point;

std::vector<Point> Blobs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> spread(0, 0.4);
  std::uniform_int_distribution<int> centre(0, 4);
  std::vector<Point> p(n);
  for (auto& q : p) {
    const int c = centre(rng);
    q = {c * 2.0 + spread(rng), (c % 2) * 3.0 + spread(rng)};
  }
  return p;
}

std::vector<Point> NoisyLine(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(0, 100);
  std::normal_distribution<double> noise(0, 5);
  std::vector<Point> p(n);
  for (auto& q : p) {
    q.x = ux(rng);
    q.y = 3 + 0.5 * q.x + noise(rng);
  }
  return p;
}

void BM_Dbscan(benchmark::State& state) {
  const auto p = Blobs(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(vizcap::RunDbscan(p, 0.3, 4));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dbscan)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_ClusterPoints(benchmark::State& state) {
  const auto p = Blobs(static_cast<std::size_t>(state.range(0)), 9);
  for (auto _ : state) benchmark::DoNotOptimize(vizcap::ClusterPoints(p, {}, {}));
}
BENCHMARK(BM_ClusterPoints)->Arg(200)->Arg(5000);

void BM_FitAndResiduals(benchmark::State& state) {
  const auto p = NoisyLine(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const auto fit = vizcap::FitLinearRegression(p);
    benchmark::DoNotOptimize(vizcap::StudentizedResiduals(p, fit));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitAndResiduals)->RangeMultiplier(8)->Range(64, 262144)->Complexity(benchmark::oN);

}  // namespace
