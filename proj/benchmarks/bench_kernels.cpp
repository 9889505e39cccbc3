// Compares the OpenMP kernels against the serial reference on the hot paths:
// the block-structured reduction, the statevector layer sweep, the
// infinite-size recursion, and one draw of the energy estimator. The serial
// variants are the ground truth the tests check against, so the interesting
// numbers here are the parallel speedups at matching results.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>

#include "qaoa/bitstrings.hpp"
#include "qaoa/infinite_limit.hpp"
#include "qaoa/instances.hpp"
#include "qaoa/parallel.hpp"
#include "qaoa/simulator.hpp"
#include "qaoa/sk_montecarlo.hpp"

namespace {

qaoa::AngleVector bench_angles(int p) {
  qaoa::AngleVector a;
  for (int j = 0; j < p; ++j) {
    a.betas.push_back(-1.1 + 0.13 * j);
    a.gammas.push_back(0.6 + 0.09 * j);
  }
  return a;
}

const qaoa::Simulator& bench_simulator() {
  static const qaoa::Simulator sim = [] {
    const qaoa::GraphInstance g = qaoa::sample_er(20, 4.0, 0xbe0c);
    qaoa::IsingHamiltonian h;
    h.n = g.n;
    for (const auto& [i, j] : g.edges) h.terms.push_back({{i, j}, 1.0});
    return qaoa::Simulator(std::move(h));
  }();
  return sim;
}

void set_threads_from(const benchmark::State& state) {
  qaoa::set_max_threads(static_cast<int>(state.range(0)));
}

}  // namespace

static void BM_BlockedSumSerial(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  for (auto _ : state) {
    const double total =
        qaoa::blocked_sum_serial<double>(n, [](std::int64_t i) { return std::sqrt(static_cast<double>(i)); });
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_BlockedSumSerial)->Arg(1 << 22);

static void BM_BlockedSumParallel(benchmark::State& state) {
  qaoa::set_max_threads(static_cast<int>(state.range(1)));
  const std::int64_t n = state.range(0);
  for (auto _ : state) {
    const double total =
        qaoa::blocked_sum<double>(n, [](std::int64_t i) { return std::sqrt(static_cast<double>(i)); });
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(state.iterations() * n);
  qaoa::set_max_threads(0);
}
BENCHMARK(BM_BlockedSumParallel)
    ->Args({1 << 22, 1})
    ->Args({1 << 22, 2})
    ->Args({1 << 22, 4});

static void BM_SimulatorEnergy(benchmark::State& state) {
  set_threads_from(state);
  const qaoa::AngleVector a = bench_angles(3);
  const qaoa::Simulator& sim = bench_simulator();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim.expected_energy(a));
  }
  qaoa::set_max_threads(0);
}
BENCHMARK(BM_SimulatorEnergy)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_SparseGraphLimit(benchmark::State& state) {
  set_threads_from(state);
  const int p = 4;
  const qaoa::BitstringTable table(p);
  const qaoa::AngleVector a = bench_angles(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qaoa::er_energy_per_vertex(table, a, 4.0));
  }
  qaoa::set_max_threads(0);
}
BENCHMARK(BM_SparseGraphLimit)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_EstimatorDraw(benchmark::State& state) {
  set_threads_from(state);
  const qaoa::AngleVector a = bench_angles(3);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qaoa::sample_sk_energy(1024, a, seed++).value);
  }
  qaoa::set_max_threads(0);
}
BENCHMARK(BM_EstimatorDraw)->Arg(1)->Arg(2)->Arg(4);

BENCHMARK_MAIN();
