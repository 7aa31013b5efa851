#include <benchmark/benchmark.h>

#include "czx/corpus.hpp"
#include "czx/operator.hpp"

namespace {

czx::KernelSpec spec_for(int n, double beta, double eps) {
  czx::KernelSpec s;
  s.n = n;
  s.beta = beta;
  s.epsilon = eps;
  return s;
}

void bm_apply_t1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto omega = czx::make_symbol(n == 1 ? "sign" : "riesz-1", n);
  const czx::Field f = czx::sweep_member(n, 7, 0);
  const auto spec = spec_for(n, 0.5, 4 * f.spacing());
  for (auto _ : state) benchmark::DoNotOptimize(czx::apply_t1(omega, spec, f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}
BENCHMARK(bm_apply_t1)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void bm_apply_full(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto omega = czx::make_symbol(n == 1 ? "sign" : "riesz-1", n);
  const czx::Field f = czx::sweep_member(n, 7, 1);
  const auto spec = spec_for(n, 0.3, 2 * f.spacing());
  for (auto _ : state) benchmark::DoNotOptimize(czx::apply_direct(omega, spec, f));
}
BENCHMARK(bm_apply_full)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace
