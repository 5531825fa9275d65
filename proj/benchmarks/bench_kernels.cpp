#include <benchmark/benchmark.h>

#include "subwalk/lattice.hpp"
#include "subwalk/subordination.hpp"

namespace {

using namespace subwalk;

void BM_SpectralKernel1d(benchmark::State& state) {
  const PhiSpec phi = PhiSpec::stable(0.5);
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nstep_kernel_spectral(phi, 1, 64, grid));
}
BENCHMARK(BM_SpectralKernel1d)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMicrosecond);

void BM_SpectralKernel2d(benchmark::State& state) {
  const PhiSpec phi = PhiSpec::stable(0.5);
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nstep_kernel_spectral(phi, 2, 64, grid));
}
BENCHMARK(BM_SpectralKernel2d)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_StepKernel(benchmark::State& state) {
  const SubordinationWeights w = weights_quadrature_terms(PhiSpec::stable(0.5), std::size_t{1} << 20);
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(subordinate_step_kernel(1, w, grid / 4, grid));
}
BENCHMARK(BM_StepKernel)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMillisecond);

void BM_CtrwKernel(benchmark::State& state) {
  const PhiSpec phi = PhiSpec::stable_mixture(0.3, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(ctrw_kernel(phi, 1, 32.0, 4096));
}
BENCHMARK(BM_CtrwKernel)->Unit(benchmark::kMicrosecond);

}  // namespace
