// Serial vs OpenMP kernels, plus the naive reference functional.
//   decohist_bench --benchmark_filter=Grid

#include <benchmark/benchmark.h>

#include "decohist/histories.hpp"
#include "decohist/protocol.hpp"
#include "decohist/random_spec.hpp"

namespace {

using namespace decohist;

struct GridInput {
  std::vector<ComplexMatrix> ops;
  ComplexMatrix rho;
};

GridInput grid_input(Eigen::Index dim, std::size_t steps) {
  const HistorySpec spec = random_spec(dim, steps, 3, RandomKind::generalized, 11);
  GridInput in;
  for (const auto& p : enumerate_paths(spec)) in.ops.push_back(path_operator(spec, p));
  in.rho = spec.initial().matrix();
  return in;
}

void BM_GridSerial(benchmark::State& state) {
  const auto in = grid_input(state.range(0), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(functional_grid(in.ops, in.rho, Execution::serial));
  state.counters["paths"] = static_cast<double>(in.ops.size());
}

void BM_GridParallel(benchmark::State& state) {
  const auto in = grid_input(state.range(0), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(functional_grid(in.ops, in.rho, Execution::parallel));
  state.counters["paths"] = static_cast<double>(in.ops.size());
}

void BM_GridReference(benchmark::State& state) {
  const auto in = grid_input(state.range(0), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(functional_grid_reference(in.ops, in.rho));
  state.counters["paths"] = static_cast<double>(in.ops.size());
}

void BM_MarginalSerial(benchmark::State& state) {
  const HistorySpec spec = random_spec(state.range(0), 3, 3, RandomKind::generalized, 5);
  EngineOptions opts;
  opts.execution = Execution::serial;
  for (auto _ : state) benchmark::DoNotOptimize(marginal_functional(spec, StepSubset({0}), opts));
}

void BM_MarginalParallel(benchmark::State& state) {
  const HistorySpec spec = random_spec(state.range(0), 3, 3, RandomKind::generalized, 5);
  for (auto _ : state) benchmark::DoNotOptimize(marginal_functional(spec, StepSubset({0})));
}

void BM_Protocol(benchmark::State& state) {
  ProtocolConfig cfg{random_spec(4, 3, 3, RandomKind::generalized, 3)};
  cfg.subset = StepSubset({0});
  cfg.shots = static_cast<std::size_t>(state.range(0));
  cfg.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_protocol(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}

}  // namespace

BENCHMARK(BM_GridSerial)->Args({4, 3})->Args({8, 3})->Args({16, 2});
BENCHMARK(BM_GridParallel)->Args({4, 3})->Args({8, 3})->Args({16, 2});
BENCHMARK(BM_GridReference)->Args({4, 3})->Args({8, 3})->Args({16, 2});
BENCHMARK(BM_MarginalSerial)->Arg(4)->Arg(8);
BENCHMARK(BM_MarginalParallel)->Arg(4)->Arg(8);
BENCHMARK(BM_Protocol)->Arg(10000);

BENCHMARK_MAIN();
