#include <benchmark/benchmark.h>

#include "subwalk/subordination.hpp"

namespace {

using namespace subwalk;

void BM_WeightsQuadrature(benchmark::State& state) {
  const PhiSpec phi = PhiSpec::stable(0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(weights_quadrature_terms(phi, static_cast<std::size_t>(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WeightsQuadrature)->RangeMultiplier(16)->Range(1 << 8, 1 << 20)->Unit(benchmark::kMillisecond);

void BM_WeightsSeries(benchmark::State& state) {
  const PhiSpec phi = PhiSpec::stable_mixture(0.3, 0.7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(weights_series(phi, static_cast<std::size_t>(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WeightsSeries)->RangeMultiplier(16)->Range(1 << 8, 1 << 16)->Unit(benchmark::kMillisecond);

void BM_SamplerDraw(benchmark::State& state) {
  const SubordinationWeights w = weights_quadrature_terms(PhiSpec::stable(0.5), std::size_t{1} << 20);
  IncrementSampler s = build_sampler(w, 1);
  for (auto _ : state) benchmark::DoNotOptimize(s());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SamplerDraw);

}  // namespace
