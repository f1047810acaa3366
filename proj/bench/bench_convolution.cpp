// OpenMP convolution kernels against the serial reference on small H1 grids.
#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>
#include <vector>

#include "carnot/convolution.hpp"

using namespace carnot;

namespace {

const KernelEngine& engine() {
  static const KernelEngine e = KernelEngine::heisenberg(GroupSpec::heisenberg(1));
  return e;
}

GridFunction bump(int n) {
  return GridFunction::sample(GridSpec::cube(3, 1.6, n), [](std::span<const double> x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
  });
}

void BM_reference_direct(benchmark::State& st) {
  const GridFunction f = bump(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::direct(f, 0.2, engine(), KernelSymbol::heat()));
  st.counters["nodes"] = static_cast<double>(f.size());
}

void BM_direct(benchmark::State& st) {
  const GridFunction f = bump(static_cast<int>(st.range(0)));
  omp_set_num_threads(static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::direct(f, 0.2, engine(), KernelSymbol::heat(), {}));
  st.counters["nodes"] = static_cast<double>(f.size());
  st.counters["threads"] = static_cast<double>(st.range(1));
}

void BM_central_fourier(benchmark::State& st) {
  const GridFunction f = bump(static_cast<int>(st.range(0)));
  omp_set_num_threads(static_cast<int>(st.range(1)));
  for (auto _ : st)
    benchmark::DoNotOptimize(kernels::central_fourier(f, 0.2, engine(), KernelSymbol::heat(), {}));
  st.counters["nodes"] = static_cast<double>(f.size());
  st.counters["threads"] = static_cast<double>(st.range(1));
}

}  // namespace

BENCHMARK(BM_reference_direct)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond)->Iterations(1);

// serial and all-threads runs; one entry when only one thread is available
void thread_args(benchmark::internal::Benchmark* b, std::vector<int64_t> sizes) {
  std::vector<int64_t> threads{1};
  if (omp_get_max_threads() > 1) threads.push_back(omp_get_max_threads());
  b->ArgsProduct({sizes, threads})->Unit(benchmark::kMillisecond);
}

BENCHMARK(BM_direct)->Apply([](auto* b) { thread_args(b, {5, 7}); });
BENCHMARK(BM_central_fourier)->Apply([](auto* b) { thread_args(b, {7, 17, 33}); });

BENCHMARK_MAIN();
