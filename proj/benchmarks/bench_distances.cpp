#include <benchmark/benchmark.h>

#include "fmtv/distances.hpp"
#include "fmtv/sampler.hpp"

namespace {

void BM_TvEstimate(benchmark::State& state) {
  const auto x = fmtv::sample_normal(0.0, static_cast<std::size_t>(state.range(0)), 11);
  const auto method = state.range(1) == 0 ? fmtv::TvMethod::kde : fmtv::TvMethod::histogram;
  for (auto _ : state) benchmark::DoNotOptimize(fmtv::tv_estimate(x, method).value);
  state.SetItemsProcessed(state.range(0) * state.iterations());
}
BENCHMARK(BM_TvEstimate)->ArgsProduct({{100000, 1000000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Kolmogorov(benchmark::State& state) {
  const auto x = fmtv::sample_normal(0.0, static_cast<std::size_t>(state.range(0)), 12);
  for (auto _ : state) benchmark::DoNotOptimize(fmtv::kolmogorov_distance(x).value);
}
BENCHMARK(BM_Kolmogorov)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

}  // namespace
