#include <benchmark/benchmark.h>

#include <vector>

#include "slschro/ensemble.hpp"
#include "slschro/initial.hpp"
#include "slschro/integrator.hpp"
#include "slschro/noise.hpp"
#include "slschro/separable.hpp"
#include "slschro/spectral.hpp"
#include "slschro/stats.hpp"

using namespace slschro;

static void BM_ForwardTransform(benchmark::State& state) {
  const auto grid = make_grid(3, static_cast<std::size_t>(state.range(0)), 48.0);
  const SpectralEngine engine(grid);
  auto f = sample_gaussian(grid, GaussianPacket{});
  for (auto _ : state) {
    engine.forward(f.values());
    benchmark::DoNotOptimize(f.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}
BENCHMARK(BM_ForwardTransform)->Arg(32)->Arg(48)->Arg(64)->Unit(benchmark::kMillisecond);

// Strang steps on one path; 100 steps per iteration.
static void BM_SplitStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto grid = make_grid(3, n, static_cast<double>(n));
  const auto spec = PotentialSpec::gaussian(3, 1.0, 3.0, 0.05);
  const SplitStepSolver solver(grid, spec, 0.01);
  const auto f = sample_gaussian(grid, GaussianPacket{});
  const auto path = sample_path(1, 0, 0.01, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solver.final_state(f, path.increments));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_SplitStep)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

static void BM_SamplePath(benchmark::State& state) {
  std::uint64_t index = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_path(7, index++, 0.01, 8.0));
  state.SetItemsProcessed(state.iterations() * 800);
}
BENCHMARK(BM_SamplePath);

static void BM_RefinePath(benchmark::State& state) {
  const auto path = sample_path(7, 0, 0.01, 8.0);
  for (auto _ : state) benchmark::DoNotOptimize(refine(path));
}
BENCHMARK(BM_RefinePath);

static void BM_RhoMoment(benchmark::State& state) {
  std::vector<double> samples(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = 1.0 + 1e-3 * static_cast<double>(i % 97);
  for (auto _ : state) benchmark::DoNotOptimize(rho_moment(samples, 4.0));
}
BENCHMARK(BM_RhoMoment)->Arg(1000)->Arg(100000);

static void BM_SeparableFreeNorm(benchmark::State& state) {
  const auto grid = make_grid(3, static_cast<std::size_t>(state.range(0)), 512.0);
  const auto f = SeparableField::gaussian(grid, GaussianPacket{1.0, {}});
  for (auto _ : state) {
    auto g = f;
    g.free_propagate(8.0);
    benchmark::DoNotOptimize(g.lp_norm(8.0));
  }
}
BENCHMARK(BM_SeparableFreeNorm)->Arg(1024);

static void BM_LpNorm(benchmark::State& state) {
  const auto grid = make_grid(3, 48, 48.0);
  const auto f = sample_gaussian(grid, GaussianPacket{});
  for (auto _ : state) benchmark::DoNotOptimize(lp_norm(f, 8.0));
}
BENCHMARK(BM_LpNorm);
BENCHMARK_MAIN();
