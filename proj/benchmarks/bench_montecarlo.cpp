#include <benchmark/benchmark.h>

#include "subwalk/montecarlo.hpp"

namespace {

using namespace subwalk;

const IncrementSampler& stable_sampler() {
  static const IncrementSampler s =
      build_sampler(weights_quadrature_terms(PhiSpec::stable(0.5), std::size_t{1} << 20), 7);
  return s;
}

void BM_SimulateWalk(benchmark::State& state) {
  IncrementSampler s = stable_sampler().reseeded(3);
  SimulationConfig cfg;
  cfg.n_steps = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_walk(cfg, s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateWalk)->RangeMultiplier(8)->Range(8, 4096);

void BM_ExitTime(benchmark::State& state) {
  const IncrementSampler& sampler = stable_sampler();
  SimulationConfig cfg;
  cfg.trials = 10000;
  cfg.base_seed = 11;
  cfg.threads = 1;
  const double r = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_exit_time(cfg, PhiSpec::stable(0.5), sampler, r));
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_ExitTime)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
