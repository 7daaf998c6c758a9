#include <benchmark/benchmark.h>

#include "fmtv/covariance.hpp"
#include "fmtv/diagrams.hpp"
#include "lattice.hpp"

namespace {

// Kernel cost depends on q only through the polynomial degree, so a dense
// symmetric polynomial (every coefficient 1) stands in for the diagram weights.
void BM_QuadLatticeSum(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const fmtv::CovarianceTable rho(fmtv::Hurst(0.7), n);
  fmtv::detail::QuadCoefficients coeffs;
  coeffs.q = q;
  for (int x = 0; x <= q; ++x)
    for (int y = 0; y <= q - x; ++y) coeffs.coeff[x][y] = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fmtv::detail::quad_lattice_sum(rho.lags(), n, coeffs, 1));
  }
  // Sorted-gap terms: about n^3 / 6.
  const double terms = static_cast<double>(n) * n * n / 6.0;
  state.counters["ns_per_term"] = benchmark::Counter(
      terms * 1e-9, benchmark::Counter::kIsIterationInvariantRate | benchmark::Counter::kInvert);
}
BENCHMARK(BM_QuadLatticeSum)
    ->ArgsProduct({{2, 3, 5, 10}, {256, 512, 1024}})
    ->Unit(benchmark::kMillisecond);

void BM_ExactCumulants(benchmark::State& state) {
  const auto spec = fmtv::VariationSpec::make(2, 0.5, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fmtv::exact_cumulants(spec).kappa4);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExactCumulants)->RangeMultiplier(2)->Range(64, 1024)->Complexity()->Unit(benchmark::kMillisecond);

}  // namespace
