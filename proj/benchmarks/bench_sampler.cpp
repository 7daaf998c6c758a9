#include <benchmark/benchmark.h>

#include "fmtv/sampler.hpp"

namespace {

void BM_FgnPair(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const fmtv::FgnGenerator gen(fmtv::Hurst(0.7), n);
  auto ws = gen.make_workspace();
  std::vector<double> a(n), b(n);
  std::uint64_t key = 1;
  for (auto _ : state) {
    gen.generate_pair(key++, a, b, *ws);
    benchmark::DoNotOptimize(a.data());
    benchmark::DoNotOptimize(b.data());
  }
  state.SetItemsProcessed(2 * state.iterations());
}
BENCHMARK(BM_FgnPair)->RangeMultiplier(4)->Range(64, 16384);

void BM_SampleVariation(benchmark::State& state) {
  const auto spec = fmtv::VariationSpec::make(2, 0.7, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fmtv::sample_variation(spec, 10000, 3).replicates.data());
  state.SetItemsProcessed(10000 * state.iterations());
}
BENCHMARK(BM_SampleVariation)->Arg(128)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
