#include <benchmark/benchmark.h>

#include <random>

#include "billiards/birkhoff.hpp"
#include "billiards/complex_map.hpp"
#include "billiards/real_map.hpp"

using namespace billiards;

static void BM_BilliardStep(benchmark::State& state) {
  TableSpec spec = builtin_table("B");
  PhasePoint p{0.3, 0.4};
  std::optional<Vec2d> v_prev;
  for (auto _ : state) {
    StepResult s = billiard_step(spec, p, v_prev);
    p = s.next;
    v_prev = s.aux.v;
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_BilliardStep);

static void BM_EllipseStep(benchmark::State& state) {
  EllipseSpec ell{1.1, 1.0};
  PhasePoint p{0.3, 0.4};
  for (auto _ : state) {
    EllipseStep s = ellipse_step(ell, p);
    p = s.next;
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_EllipseStep);

static void BM_Jacobian(benchmark::State& state) {
  TableSpec spec = builtin_table("B");
  StepResult s = billiard_step(spec, PhasePoint{0.3, 0.4});
  for (auto _ : state) {
    Mat2d J = jacobian_df_real(spec, PhasePoint{0.3, 0.4}, s.aux);
    benchmark::DoNotOptimize(J);
  }
}
BENCHMARK(BM_Jacobian);

static void BM_ComplexStep(benchmark::State& state) {
  TableSpec spec = builtin_table("B");
  GuessBundle g = seed_from_real(spec, PhasePoint{0.3, 0.4});
  CPhasePoint p(Complex(0.3, 0.01), Complex(0.4, -0.01));
  for (auto _ : state) {
    CStepResult r = complex_step(spec, p, g);
    benchmark::DoNotOptimize(r.next);
  }
}
BENCHMARK(BM_ComplexStep);

static void BM_ClassifyOrbit(benchmark::State& state) {
  TableSpec spec = builtin_table("A");
  int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    ClassifiedPoint c = classify_orbit(spec, PhasePoint{0.3, 0.4}, n);
    benchmark::DoNotOptimize(c);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ClassifyOrbit)->Arg(250)->Arg(500)->Arg(1000)->Complexity(benchmark::oN);

static void BM_CurvatureScan(benchmark::State& state) {
  TableSpec spec = builtin_table("C");
  for (auto _ : state) {
    double k = min_signed_curvature(spec, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(k);
  }
}
BENCHMARK(BM_CurvatureScan)->Arg(1024)->Arg(4096);
