#include <benchmark/benchmark.h>

#include <vector>

#include "czx/spectral.hpp"

namespace {

void bm_symbol_k1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const double beta = 1.0 / static_cast<double>(state.range(1));
  const auto omega = czx::make_symbol(n == 1 ? "sign" : "riesz-1", n);
  czx::KernelSpec spec;
  spec.n = n;
  spec.beta = beta;
  spec.epsilon = 0.01;
  std::vector<double> y(static_cast<std::size_t>(n), 0.0);
  y[0] = 3.0;
  for (auto _ : state) benchmark::DoNotOptimize(czx::symbol_k1(omega, spec, y));
}
BENCHMARK(bm_symbol_k1)->Args({1, 2})->Args({1, 100})->Args({2, 2})->Args({2, 100})->Unit(benchmark::kMicrosecond);

}  // namespace
