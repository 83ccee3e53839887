#include <benchmark/benchmark.h>

#include "billiards/spectral.hpp"

using namespace billiards;

namespace {

struct Fixture {
  TableSpec table = builtin_table("B");
  ShootVector orbit;
  EigenData eig;

  Fixture() {
    orbit = newton_periodic(table, ShootVector{{{0.5, 0.01}, {0.0, -0.01}}});
    eig = multipliers_and_eigvecs(table, orbit);
  }
  static const Fixture& get() {
    static Fixture f;
    return f;
  }
};

}  // namespace

static void BM_DftCompose(benchmark::State& state) {
  const auto& fx = Fixture::get();
  int N = static_cast<int>(state.range(0));
  SpectralChart chart = newton_parameterization(fx.table, fx.orbit, fx.eig, ChartKind::unstable,
                                                0.3, N);
  BilliardShootOracle oracle(fx.table, fx.orbit);
  for (auto _ : state) {
    ComposeResult r = dft_compose(oracle, chart.coeffs);
    benchmark::DoNotOptimize(r.coeffs);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DftCompose)->Arg(20)->Arg(40)->Arg(60)->Complexity();

static void BM_ChartNewton(benchmark::State& state) {
  const auto& fx = Fixture::get();
  int N = static_cast<int>(state.range(0));
  for (auto _ : state) {
    SpectralChart chart =
        newton_parameterization(fx.table, fx.orbit, fx.eig, ChartKind::unstable, 0.3, N);
    benchmark::DoNotOptimize(chart.coeffs);
  }
}
BENCHMARK(BM_ChartNewton)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

static void BM_ConjugacyError(benchmark::State& state) {
  const auto& fx = Fixture::get();
  SpectralChart chart =
      newton_parameterization(fx.table, fx.orbit, fx.eig, ChartKind::stable, 0.3, 40);
  for (auto _ : state) {
    double e = conjugacy_error(fx.table, fx.orbit, chart, 128);
    benchmark::DoNotOptimize(e);
  }
  state.SetLabel("M=128");
}
BENCHMARK(BM_ConjugacyError)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
