#include <benchmark/benchmark.h>

#include <vector>

#include "urank/learners.hpp"
#include "urank/risk.hpp"
#include "urank/roc.hpp"
#include "urank/ustat.hpp"

using namespace urank;

namespace {

std::pair<std::vector<double>, std::vector<double>> score_label(std::size_t n) {
  Rng rng(RngSeed{1});
  std::vector<double> s(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = static_cast<double>(rng.index(n / 4 + 1));
    y[i] = rng.rademacher();
  }
  y[0] = 1;
  y[1] = -1;
  return {s, y};
}

void BM_AucMidrank(benchmark::State& state) {
  const auto [s, y] = score_label(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(auc(s, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AucMidrank)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_AucBrute(benchmark::State& state) {
  const auto [s, y] = score_label(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(auc_brute(s, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AucBrute)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

void BM_UStatRankingKernel(benchmark::State& state) {
  const auto d = sample_dataset(model_m1(), static_cast<std::size_t>(state.range(0)), RngSeed{2});
  const auto q = ranking_loss_kernel(RankingRule::from_scorer(ScoringFunction(Stump{0, 1.0, 1})));
  for (auto _ : state) benchmark::DoNotOptimize(u_stat(q, d));
}
BENCHMARK(BM_UStatRankingKernel)->RangeMultiplier(4)->Range(64, 1024);

void BM_ErmStumps(benchmark::State& state) {
  const auto d = sample_dataset(model_m1(), static_cast<std::size_t>(state.range(0)), RngSeed{3});
  const auto grid = StumpGrid::from_data(d);
  for (auto _ : state) benchmark::DoNotOptimize(erm_stumps(d, grid));
}
BENCHMARK(BM_ErmStumps)->RangeMultiplier(4)->Range(64, 4096);

void BM_ErmStumpsBrute(benchmark::State& state) {
  const auto d = sample_dataset(model_m1(), static_cast<std::size_t>(state.range(0)), RngSeed{3});
  const auto grid = StumpGrid::from_data(d);
  for (auto _ : state) benchmark::DoNotOptimize(erm_stumps_brute(d, grid));
}
BENCHMARK(BM_ErmStumpsBrute)->RangeMultiplier(4)->Range(64, 1024);

SyntheticModel grid_model(std::size_t atoms) {
  return SyntheticModel(NoiselessRegression{uniform_grid(0.0, 1.0, atoms), StepFn{0, 0.3, 0.0, 1.0}});
}

void BM_StumpExcessTableBuild(benchmark::State& state) {
  const PairLaw law(grid_model(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(StumpExcessTable(law).min_excess());
}
BENCHMARK(BM_StumpExcessTableBuild)->RangeMultiplier(4)->Range(64, 2048);

void BM_ExcessRiskDirect(benchmark::State& state) {
  const auto model = grid_model(static_cast<std::size_t>(state.range(0)));
  const ScoringFunction s(Stump{0, 0.5, 1});
  for (auto _ : state) benchmark::DoNotOptimize(excess_risk(s, model));
}
BENCHMARK(BM_ExcessRiskDirect)->RangeMultiplier(4)->Range(64, 2048);

}  // namespace

BENCHMARK_MAIN();
