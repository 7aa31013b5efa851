#include <benchmark/benchmark.h>

#include <cmath>

#include "czx/maximal.hpp"

namespace {

void bm_dyadic_maximal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto cells = static_cast<std::size_t>(state.range(1));
  const auto nn = static_cast<std::size_t>(n);
  czx::Field f(std::vector<std::size_t>(nn, cells), 1.0 / static_cast<double>(cells), std::vector<double>(nn, 0.0));
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(0.37 * static_cast<double>(i)) * std::exp(-1e-3 * i);
  for (auto _ : state) benchmark::DoNotOptimize(czx::dyadic_maximal(f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}
BENCHMARK(bm_dyadic_maximal)->Args({1, 4096})->Args({2, 64})->Args({2, 256});

}  // namespace

BENCHMARK_MAIN();
