// Serial reference vs OpenMP kernels for the full-batch gradients.
//
//   bench_kernels --benchmark_filter=LeastSquares
//
// Set OMP_NUM_THREADS to vary the parallel side.

#include <random>

#include <benchmark/benchmark.h>

#include "adanorm/kernels.hpp"

using namespace adanorm;

namespace {

RowMatrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(engine);
  return m;
}

Vector gaussian(Eigen::Index n, std::uint64_t seed) {
  return gaussian(n, 1, seed).col(0);
}

template <Execution E>
void LeastSquaresGradient(benchmark::State& state) {
  const auto n = state.range(0), d = state.range(1);
  const RowMatrix a = gaussian(n, d, 1);
  const Vector y = gaussian(n, 2), x = gaussian(d, 3);
  Vector g(d);
  for (auto _ : state) {
    if constexpr (E == Execution::Parallel) {
      kernels::least_squares_gradient(a, y, x, g);
    } else {
      kernels::serial::least_squares_gradient(a, y, x, g);
    }
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
  state.counters["threads"] = E == Execution::Parallel ? kernels::max_threads() : 1;
}

template <Execution E>
void ReluNetGradient(benchmark::State& state) {
  const auto n = state.range(0), m = state.range(1), d = state.range(2);
  const RowMatrix inputs = gaussian(n, d, 4);
  const Vector targets = gaussian(n, 5), outer = gaussian(m, 6), w = gaussian(m * d, 7);
  Vector g(m * d);
  for (auto _ : state) {
    if constexpr (E == Execution::Parallel) {
      kernels::relu_net_gradient(inputs, targets, outer, w, g);
    } else {
      kernels::serial::relu_net_gradient(inputs, targets, outer, w, g);
    }
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
  state.counters["threads"] = E == Execution::Parallel ? kernels::max_threads() : 1;
}

}  // namespace

BENCHMARK(LeastSquaresGradient<Execution::Serial>)->Args({1000, 20})->Args({100000, 50});
BENCHMARK(LeastSquaresGradient<Execution::Parallel>)->Args({1000, 20})->Args({100000, 50});
BENCHMARK(ReluNetGradient<Execution::Serial>)->Args({100, 200, 10})->Args({5000, 200, 10});
BENCHMARK(ReluNetGradient<Execution::Parallel>)->Args({100, 200, 10})->Args({5000, 200, 10});

BENCHMARK_MAIN();
