#include <benchmark/benchmark.h>

#include <cmath>

#include "shiftindex/analytic_index.hpp"
#include "shiftindex/topological_index.hpp"

using namespace shiftindex;

namespace {

const cplx I{0.0, 1.0};

GroupPtr golden_circle() {
  return IsometryGroup::make(ManifoldModel::circle(), GroupLaw::FreeAbelian, 0,
                             {Generator::circle_rotation(RotationNumber::golden())});
}

CrossedSymbol banded(GroupPtr group, GridPtr grid, long long radius) {
  CrossedSymbol a = CrossedSymbol::identity(group, grid, 1).scaled(3.0);
  for (const auto& g : group->ball(radius)) {
    const double w = 0.3 / (1.0 + group->word_length(g));
    a = a + CrossedSymbol::delta_scalar(group, grid, g, [w](const GridNode& n) {
          return w * std::exp(I * n.base[0]) * (1.0 + 0.5 * n.fiber[0]);
        });
  }
  return a;
}

void BM_Convolve(benchmark::State& state) {
  const auto group = golden_circle();
  const auto grid = build_cosphere_grid(ManifoldModel::circle(), static_cast<int>(state.range(0)));
  const auto a = banded(group, grid, state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(convolve(a, a));
}
BENCHMARK(BM_Convolve)->Args({64, 4})->Args({128, 4})->Args({128, 16})->Unit(benchmark::kMillisecond);

void BM_Invert(benchmark::State& state) {
  const auto group = golden_circle();
  const auto grid = build_cosphere_grid(ManifoldModel::circle(), 64);
  const auto a = banded(group, grid, 1);
  for (auto _ : state) benchmark::DoNotOptimize(invert(a, 1e-10, state.range(0)));
}
BENCHMARK(BM_Invert)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_ConvolveTorus(benchmark::State& state) {
  const auto torus = ManifoldModel::torus2();
  const auto group = IsometryGroup::make(torus, GroupLaw::FreeAbelian, 0,
                                         {Generator::torus_translation(RotationNumber::golden(),
                                                                       RotationNumber::rational(1, 3))});
  const auto grid = build_cosphere_grid(torus, static_cast<int>(state.range(0)));
  const auto a = banded(group, grid, 2);
  for (auto _ : state) benchmark::DoNotOptimize(convolve(a, a));
}
BENCHMARK(BM_ConvolveTorus)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_EstimateToeplitz(benchmark::State& state) {
  const auto group = golden_circle();
  const auto grid = build_base_grid(ManifoldModel::circle(), 64);
  const auto sigma = CrossedSymbol::delta_scalar(group, grid, group->identity(),
                                                 [](const GridNode& n) { return std::exp(I * n.base[0]); }) +
                     CrossedSymbol::delta_scalar(group, grid, group->generator(0),
                                                 [](const GridNode&) { return cplx(0.2); });
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_index([&](int t) { return toeplitz(sigma, t); }, {n / 4, n / 2, n}));
  }
}
BENCHMARK(BM_EstimateToeplitz)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ModelEuler(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(model_euler_index(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ModelEuler)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_LocalOdd(benchmark::State& state) {
  const auto group = golden_circle();
  const auto grid = build_base_grid(ManifoldModel::circle(), 128);
  const auto sigma = CrossedSymbol::delta_scalar(group, grid, group->identity(),
                                                 [](const GridNode& n) { return std::exp(I * n.base[0]); }) +
                     CrossedSymbol::delta_scalar(group, grid, group->generator(0),
                                                 [](const GridNode& n) { return 0.2 * std::cos(n.base[0]); });
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_local_odd(sigma, state.range(0)));
}
BENCHMARK(BM_LocalOdd)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
