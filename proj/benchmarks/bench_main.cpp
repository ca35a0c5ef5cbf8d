// Microbenchmarks for the hot paths: Jost solves (double and double-double),
// kernel evaluation, operator-norm estimation on both backends, the adaptive
// integrator, and a full energy audit. Run with --benchmark_filter=... to
// select a subset.

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>

#include "semiscat/energy.hpp"
#include "semiscat/jost.hpp"
#include "semiscat/kernel.hpp"
#include "semiscat/norm.hpp"
#include "semiscat/potential.hpp"
#include "semiscat/quadrature.hpp"
#include "semiscat/weights.hpp"

namespace {

using namespace semiscat;

// (h, E) corners: index 0 is a typical point, index 1 the expensive corner
// (small h, large E: shortest wavelength, most panels).
constexpr double kH[] = {1.0, 0.1};
constexpr double kE[] = {2.0, 4.0};

void BM_JostSolve(benchmark::State& state) {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const double h = kH[state.range(0)], E = kE[state.range(0)];
  for (auto _ : state) {
    JostPair jp = jost_pair(V, h, E, 0.0);
    benchmark::DoNotOptimize(jp.sd.W);
  }
}
BENCHMARK(BM_JostSolve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_JostSolveSingular(benchmark::State& state) {
  const Potential V = catalog_get("inverse_sqrt_singular", {1.0, 1.0});
  for (auto _ : state) {
    JostPair jp = jost_pair(V, 0.5, 2.0, 0.0);
    benchmark::DoNotOptimize(jp.sd.W);
  }
}
BENCHMARK(BM_JostSolveSingular)->Unit(benchmark::kMillisecond);

void BM_JostSolveDD(benchmark::State& state) {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  for (auto _ : state) {
    JostPairDD jp = jost_pair_dd(V, 0.5, 2.0, 0.0);
    benchmark::DoNotOptimize(jp.sd.W);
  }
}
BENCHMARK(BM_JostSolveDD)->Unit(benchmark::kMillisecond);

void BM_KernelBuild(benchmark::State& state) {
  const Potential V = catalog_get("sech_squared", {1.0, 2.0});
  for (auto _ : state) {
    KernelEval K = make_kernel(V, 0.5, 2.0, 0.1);
    benchmark::DoNotOptimize(K.sd.W);
  }
}
BENCHMARK(BM_KernelBuild)->Unit(benchmark::kMillisecond);

void BM_KernelPointEval(benchmark::State& state) {
  const Potential V = catalog_get("sech_squared", {1.0, 2.0});
  const KernelEval K = make_kernel(V, 0.5, 2.0, 0.1);
  double x = -3.0;
  for (auto _ : state) {
    std::complex<double> v = K.value(x, 0.7);
    benchmark::DoNotOptimize(v);
    x = x < 3.0 ? x + 1e-3 : -3.0; // march so the panel lookup is realistic
  }
}
BENCHMARK(BM_KernelPointEval);

void BM_NormKernelBackend(benchmark::State& state) {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightMap a = map_sqrt_wprime(build_sinh_weight(envelope_abs(V), 0.5, 2.0));
  for (auto _ : state) {
    NormEstimate est = norm_via_kernel(V, 0.5, 2.0, 0.2, a, {});
    benchmark::DoNotOptimize(est.value);
  }
}
BENCHMARK(BM_NormKernelBackend)->Unit(benchmark::kMillisecond);

void BM_NormMatrixBackend(benchmark::State& state) {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightMap a = map_sqrt_wprime(build_sinh_weight(envelope_abs(V), 0.5, 2.0));
  for (auto _ : state) {
    NormEstimate est = norm_via_matrix(V, 0.5, 2.0, 0.2, a, {});
    benchmark::DoNotOptimize(est.value);
  }
}
BENCHMARK(BM_NormMatrixBackend)->Unit(benchmark::kMillisecond);

void BM_QuadratureSmooth(benchmark::State& state) {
  for (auto _ : state) {
    auto r = integrate_adaptive([](double x) { return std::exp(-x * x); },
                                -8.0, 8.0);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_QuadratureSmooth);

void BM_QuadratureSingular(benchmark::State& state) {
  const SingularPoint s{0.0, 0.5};
  for (auto _ : state) {
    auto r = integrate_adaptive(
        [](double x) { return 1.0 / std::sqrt(std::fabs(x)); }, -1.0, 1.0, {}, {s});
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_QuadratureSingular);

void BM_EnergyAudit(benchmark::State& state) {
  const Potential V = catalog_get("square_barrier", {1.0, 1.0});
  const WeightFunction w = build_sinh_weight(envelope_abs(V), 1.0, 1.0);
  const TestFunction v = audit_test_functions().front();
  for (auto _ : state) {
    EnergyTrace t = audit_energy(V, w, v, 1.0, 1.0, 0.1);
    benchmark::DoNotOptimize(t.flux_rel);
  }
}
BENCHMARK(BM_EnergyAudit)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
