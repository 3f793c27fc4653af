#include <benchmark/benchmark.h>

#include "vizcap/prompt.hpp"

namespace {

vizcap::VisualizationMetadata Meta() {
  vizcap::VisualizationMetadata m;
  m.title = "GDP per capita VS Healthy life expectancy";
  m.x_label = "GDP per capita";
  m.y_label = "Healthy life expectancy";
  m.other_columns = {"Social support", "Generosity", "Score", "Country or region"};
  m.x_range = {0.0, 1.684, false};
  m.y_range = {0.0, 1.141, false};
  m.facts = vizcap::RegressionFacts{0.27, 0.51, 0.84, {{"Swaziland", vizcap::Direction::kLower}}};
  return m;
}

void BM_BuildTier1Prompt(benchmark::State& state) {
  const auto meta = Meta();
  for (auto _ : state) benchmark::DoNotOptimize(vizcap::BuildTier1Prompt(meta));
}
BENCHMARK(BM_BuildTier1Prompt);

// Rolling prompt with N completed turns.
void BM_AssembleRollingPrompt(benchmark::State& state) {
  auto doc = vizcap::WithBaseCaption(vizcap::BuildTier1Prompt(Meta()), "A caption about health and wealth.");
  doc = vizcap::AppendTurn(std::move(doc), vizcap::TurnKind::kInstruction, "Explain the trend.");
  doc = vizcap::CompletePendingTurn(std::move(doc), "Richer countries live longer.");
  for (int i = 1; i < state.range(0); ++i) {
    doc = vizcap::AppendTurn(std::move(doc), vizcap::TurnKind::kQuestion, "Why is that the case?");
    doc = vizcap::CompletePendingTurn(std::move(doc), "Because of better access to healthcare and nutrition.");
  }
  for (auto _ : state) {
    const auto prompt = vizcap::AssembleRollingPrompt(doc);
    benchmark::DoNotOptimize(vizcap::EstimateTokens(prompt));
  }
}
BENCHMARK(BM_AssembleRollingPrompt)->Arg(1)->Arg(8)->Arg(32);

}  // namespace
