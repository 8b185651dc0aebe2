// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include <omp.h>
#include <vector>

#include "fclt/kernels.hpp"
#include "fclt/ned.hpp"
#include "fclt/rng.hpp"

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  fclt::Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

void BM_LaggedRef(benchmark::State& state) {
  const auto a = noise(static_cast<std::size_t>(state.range(0)), 1);
  const auto b = noise(a.size(), 2);
  std::vector<double> out(51);
  for (auto _ : state) {
    fclt::lagged_cross_products_ref(a, b, 50, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 51);
}

void BM_LaggedOmp(benchmark::State& state) {
  const auto a = noise(static_cast<std::size_t>(state.range(0)), 1);
  const auto b = noise(a.size(), 2);
  std::vector<double> out(51);
  const int threads = omp_get_max_threads();
  for (auto _ : state) {
    fclt::lagged_cross_products(a, b, 50, out, threads);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 51);
}

void BM_NedCoupling(benchmark::State& state) {
  fclt::ArmaSpec ar;
  ar.phi = {-0.5};
  fclt::NedOptions opt;
  opt.exec.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto est = fclt::estimate_ned(ar, fclt::Functional::identity(), 5, 16, 256, 7, opt);
    benchmark::DoNotOptimize(est.nu_hat);
  }
}

}  // namespace

BENCHMARK(BM_LaggedRef)->Arg(10'000)->Arg(100'000);
BENCHMARK(BM_LaggedOmp)->Arg(10'000)->Arg(100'000);
// 1 runs the serial branch, 0 all cores.
BENCHMARK(BM_NedCoupling)->Arg(1)->Arg(0);

BENCHMARK_MAIN();
