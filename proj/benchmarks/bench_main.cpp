#include <benchmark/benchmark.h>

#include <random>

#include "qcoef/quantizer.hpp"
#include "qcoef/sampler.hpp"
#include "qcoef/system_io.hpp"
#include "qcoef/thermodynamics.hpp"
#include "qcoef/transport.hpp"
#include "qcoef/word_set.hpp"

using namespace qcoef;

namespace {

const InfiniteIFS& gamma3() {
  static const InfiniteIFS g(builtin_system("gamma3"));
  return g;
}

void BM_Pressure(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(pressure(gamma3(), 0.4, 0.3));
}
BENCHMARK(BM_Pressure);

void BM_Beta(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(beta(gamma3(), 0.4));
}
BENCHMARK(BM_Beta);

void BM_QuantizationDimension(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(quantization_dimension(gamma3(), 2.0));
}
BENCHMARK(BM_QuantizationDimension);

void BM_Sample(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample(gamma3(), count, 1e-6, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sample)->Arg(10000)->Arg(100000);

void BM_Lloyd(benchmark::State& state) {
  static const EmpiricalMeasure em = sample(gamma3(), 100000, 1e-6, 1);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lloyd(em, n, 2.0, {.seed = 1, .restarts = 1}));
}
BENCHMARK(BM_Lloyd)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Assignment(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 gen(1);
  std::vector<double> cost(n * n);
  for (double& c : cost) c = uniform01(gen);
  for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(cost, n));
}
BENCHMARK(BM_Assignment)->Arg(16)->Arg(64);

void BM_BuildFn(benchmark::State& state) {
  const std::vector<double> g{0.4, 0.3, 0.2};
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_F_n(g, n));
}
BENCHMARK(BM_BuildFn)->Arg(256)->Arg(65536);

}  // namespace

BENCHMARK_MAIN();
