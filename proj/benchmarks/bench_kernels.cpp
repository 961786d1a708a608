// Serial reference vs OpenMP kernels on pool-sized inputs.
//
//   OMP_NUM_THREADS=4 ./build/benchmarks/bench_kernels

#include <benchmark/benchmark.h>

#include <random>

#include "ballet/gp/model.hpp"
#include "ballet/reference/serial.hpp"

namespace {

using ballet::gp::Matrix;
using ballet::gp::Vector;

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

const ballet::gp::KernelSpec kRbf = ballet::gp::RbfKernel{1.0, 4.0};

void BM_KernelMatrixSerial(benchmark::State& state) {
  const Matrix pool = random_matrix(state.range(0), state.range(1), 1);
  const Matrix train = random_matrix(50, state.range(1), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ballet::reference::kernel_matrix(kRbf, train, pool));
  }
}

void BM_KernelMatrixParallel(benchmark::State& state) {
  const Matrix pool = random_matrix(state.range(0), state.range(1), 1);
  const Matrix train = random_matrix(50, state.range(1), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ballet::gp::kernel_matrix(kRbf, train, pool));
  }
}

ballet::gp::Model fitted(Eigen::Index n, Eigen::Index d) {
  const Matrix x = random_matrix(n, d, 3);
  const Vector y = random_matrix(n, 1, 4).col(0);
  return ballet::gp::fit_posterior(x, y, {kRbf, 1e-2});
}

void BM_PosteriorSerial(benchmark::State& state) {
  const auto model = fitted(50, state.range(1));
  const Matrix pool = random_matrix(state.range(0), state.range(1), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ballet::reference::posterior_mean_var(model, pool));
  }
}

void BM_PosteriorParallel(benchmark::State& state) {
  const auto model = fitted(50, state.range(1));
  const Matrix pool = random_matrix(state.range(0), state.range(1), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ballet::gp::posterior_mean_var(model, pool));
  }
}

}  // namespace

BENCHMARK(BM_KernelMatrixSerial)->Args({1000, 1})->Args({2000, 200});
BENCHMARK(BM_KernelMatrixParallel)->Args({1000, 1})->Args({2000, 200});
BENCHMARK(BM_PosteriorSerial)->Args({1000, 1})->Args({2000, 200});
BENCHMARK(BM_PosteriorParallel)->Args({1000, 1})->Args({2000, 200});

BENCHMARK_MAIN();
