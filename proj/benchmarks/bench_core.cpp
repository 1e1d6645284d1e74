#include <benchmark/benchmark.h>

#include "qml/frame.hpp"
#include "qml/spectral.hpp"
#include "qml/verify.hpp"

using namespace qml;

static void BM_QuotientBases(benchmark::State& state) {
  const int top = static_cast<int>(state.range(0));
  for (auto _ : state) {
    // fresh ideal each round so the cache does not hide the work
    const GradedIdeal ideal = j_theta_power(ThetaDirection::ones(3), 2);
    benchmark::DoNotOptimize(build_frame(ideal, top).dims());
  }
}
BENCHMARK(BM_QuotientBases)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_LineQuotientBases(benchmark::State& state) {
  const int top = static_cast<int>(state.range(0));
  for (auto _ : state) {
    HPoly g = HPoly::variable(3, 0);
    g -= HPoly::variable(3, 1);
    const GradedIdeal ideal = GradedIdeal::from_generators(3, {g});
    benchmark::DoNotOptimize(build_frame(ideal, top).dims());
  }
}
BENCHMARK(BM_LineQuotientBases)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_Commutator(benchmark::State& state) {
  const QuotientFrame frame =
      build_frame(j_theta_power(ThetaDirection::ones(3), 2), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(commutator_blocks(0, 1, frame).norm());
}
BENCHMARK(BM_Commutator)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_TraceFormula(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n_pow = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        verify_trace_formula(d, n_pow, HPoly::variable(d, 0), HPoly::variable(d, 0), 40).pass);
  }
}
BENCHMARK(BM_TraceFormula)->Args({3, 2})->Args({4, 2})->Args({3, 3})->Unit(benchmark::kSecond)->Iterations(1);

static void BM_EssentialProbe(benchmark::State& state) {
  const QuotientFrame frame = build_frame(j_theta_power(ThetaDirection::ones(3), 2), 30);
  const std::vector<BlockOperator> shifts = {compress_multiplier(HPoly::variable(3, 0), frame),
                                             compress_multiplier(HPoly::variable(3, 1), frame),
                                             compress_multiplier(HPoly::variable(3, 2), frame)};
  const std::vector<Complex> lambda(3, Complex(1.0));
  for (auto _ : state) benchmark::DoNotOptimize(essential_spectrum_probe(lambda, shifts, 10));
}
BENCHMARK(BM_EssentialProbe)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
