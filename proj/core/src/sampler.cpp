#include "fmtv/sampler.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>

#include "fmtv/compensated_sum.hpp"
#include "fmtv/errors.hpp"
#include "fmtv/hermite.hpp"
#include "fmtv/parallel.hpp"
#include "fmtv/rng.hpp"

namespace fmtv {

namespace {

// FFTW planning is not thread-safe; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_smooth_size(std::size_t target) {
  for (std::size_t m = std::max<std::size_t>(target, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

struct FftBuffer {
  fftw_complex* data = nullptr;
  fftw_plan plan = nullptr;

  explicit FftBuffer(std::size_t size) {
    std::lock_guard lock(planner_mutex());
    data = fftw_alloc_complex(size);
    // FFTW_ESTIMATE picks the algorithm deterministically, which keeps the
    // sampled bits identical from run to run.
    plan = fftw_plan_dft_1d(static_cast<int>(size), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~FftBuffer() {
    std::lock_guard lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (data) fftw_free(data);
  }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
};

}  // namespace

class FgnGenerator::Workspace {
 public:
  explicit Workspace(std::size_t fft_size) {
    if (fft_size > 0) fft.emplace(fft_size);
  }
  std::optional<FftBuffer> fft;
  std::vector<double> z0, z1;
};

struct FgnGenerator::Impl {
  std::size_t n = 0;
  std::size_t m = 0;  // embedding size; 0 on the Cholesky/direct path
  double min_eigen = 1.0;
  std::vector<double> scale;  // sqrt(lambda_k / M)
  Eigen::MatrixXd chol;       // lower factor on the Cholesky path
};

namespace {

void setup_circulant(FgnGenerator::Impl& impl, const std::vector<double>& lags, std::size_t n,
                     std::size_t m, double tol) {
  impl.n = n;
  if (n == 1) {
    impl.m = 0;
    return;
  }
  FftBuffer fft(m);
  for (std::size_t j = 0; j < m; ++j) {
    fft.data[j][0] = lags[std::min(j, m - j)];
    fft.data[j][1] = 0.0;
  }
  fftw_execute(fft.plan);
  double min_eigen = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m; ++k) min_eigen = std::min(min_eigen, fft.data[k][0]);
  impl.min_eigen = min_eigen;
  if (min_eigen >= -tol) {
    impl.m = m;
    impl.scale.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      impl.scale[k] = std::sqrt(std::max(fft.data[k][0], 0.0) / static_cast<double>(m));
    }
    return;
  }
  std::clog << "fmtv: circulant embedding of size " << m << " has eigenvalue " << min_eigen
            << "; falling back to Cholesky\n";
  impl.m = 0;
  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cov(i, j) = lags[i > j ? i - j : j - i];
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw CovarianceError("Toeplitz covariance is numerically not positive definite");
  }
  impl.chol = llt.matrixL();
}

}  // namespace

FgnGenerator::FgnGenerator(Hurst hurst, std::size_t n, double clip_tolerance)
    : impl_(std::make_unique<Impl>()) {
  if (n < 1) throw DomainError("fGn sample length must be >= 1");
  const std::size_t m = n == 1 ? 0 : next_smooth_size(2 * (n - 1));
  const CovarianceTable table(hurst, std::max(n, m / 2 + 1));
  const std::vector<double> lags(table.lags().begin(), table.lags().end());
  setup_circulant(*impl_, lags, n, m, clip_tolerance);
}

FgnGenerator::FgnGenerator(const CovarianceTable& table, std::size_t n, double clip_tolerance)
    : impl_(std::make_unique<Impl>()) {
  if (n < 1) throw DomainError("sample length must be >= 1");
  if (table.size() < n) throw DomainError("covariance table shorter than n");
  const std::vector<double> lags(table.lags().begin(), table.lags().end());
  setup_circulant(*impl_, lags, n, n == 1 ? 0 : 2 * (n - 1), clip_tolerance);
}

FgnGenerator::~FgnGenerator() = default;
FgnGenerator::FgnGenerator(FgnGenerator&&) noexcept = default;
FgnGenerator& FgnGenerator::operator=(FgnGenerator&&) noexcept = default;

std::size_t FgnGenerator::n() const { return impl_->n; }
std::size_t FgnGenerator::embedding_size() const { return impl_->m; }
bool FgnGenerator::uses_circulant() const { return impl_->m > 0; }
double FgnGenerator::min_eigenvalue() const { return impl_->min_eigen; }

void FgnGenerator::WorkspaceDeleter::operator()(Workspace* ws) const { delete ws; }

FgnGenerator::WorkspacePtr FgnGenerator::make_workspace() const {
  WorkspacePtr ws(new Workspace(impl_->m));
  if (impl_->m == 0) {
    ws->z0.resize(impl_->n);
    ws->z1.resize(impl_->n);
  }
  return ws;
}

void FgnGenerator::generate_pair(std::uint64_t key, std::span<double> row0, std::span<double> row1,
                                 Workspace& ws) const {
  const std::size_t n = impl_->n;
  if (row0.size() < n || row1.size() < n) throw DomainError("generate_pair: rows shorter than n");
  CounterStream stream(key);
  if (impl_->m > 0) {
    const std::size_t m = impl_->m;
    fftw_complex* w = ws.fft->data;
    for (std::size_t k = 0; k < m; ++k) {
      const double re = stream.next_normal();
      const double im = stream.next_normal();
      w[k][0] = impl_->scale[k] * re;
      w[k][1] = impl_->scale[k] * im;
    }
    fftw_execute_dft(ws.fft->plan, w, w);
    for (std::size_t j = 0; j < n; ++j) {
      row0[j] = w[j][0];
      row1[j] = w[j][1];
    }
    return;
  }
  if (n == 1) {
    row0[0] = stream.next_normal();
    row1[0] = stream.next_normal();
    return;
  }
  for (std::size_t j = 0; j < n; ++j) {
    ws.z0[j] = stream.next_normal();
    ws.z1[j] = stream.next_normal();
  }
  const auto& l = impl_->chol;
  for (std::size_t i = 0; i < n; ++i) {
    double a = 0.0, b = 0.0;
    for (std::size_t j = 0; j <= i; ++j) {
      a += l(i, j) * ws.z0[j];
      b += l(i, j) * ws.z1[j];
    }
    row0[i] = a;
    row1[i] = b;
  }
}

namespace {

// Runs fill(pair_index, row0, row1) for every pair, block by block, with one
// workspace per worker. Rows beyond `count` are scratch.
template <typename Consume>
void for_each_pair(const FgnGenerator& gen, std::size_t count, std::uint64_t seed,
                   const SamplerOptions& options, Consume&& consume) {
  const std::size_t pairs = (count + 1) / 2;
  const std::size_t pairs_per_block = std::max<std::size_t>(1, options.block_size / 2);
  const std::size_t blocks = (pairs + pairs_per_block - 1) / pairs_per_block;
  const unsigned workers = static_cast<unsigned>(std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(blocks, 1)));
  std::vector<FgnGenerator::WorkspacePtr> spaces(workers);
  std::vector<std::vector<double>> rows(workers, std::vector<double>(2 * gen.n()));
  parallel_for_dynamic(blocks, workers, [&](std::size_t block, unsigned w) {
    if (!spaces[w]) spaces[w] = gen.make_workspace();
    std::span<double> r0(rows[w].data(), gen.n());
    std::span<double> r1(rows[w].data() + gen.n(), gen.n());
    const std::size_t begin = block * pairs_per_block;
    const std::size_t end = std::min(pairs, begin + pairs_per_block);
    for (std::size_t p = begin; p < end; ++p) {
      gen.generate_pair(stream_key(seed, p), r0, r1, *spaces[w]);
      consume(p, std::span<const double>(r0), std::span<const double>(r1));
    }
  });
}

}  // namespace

SampleMatrix sample_fgn(Hurst hurst, std::size_t n, std::size_t count, std::uint64_t seed,
                        const SamplerOptions& options) {
  if (count < 1) throw DomainError("replicate count must be >= 1");
  const FgnGenerator gen(hurst, n, options.clip_tolerance);
  SampleMatrix out{count, n, std::vector<double>(count * n)};
  for_each_pair(gen, count, seed, options,
                [&](std::size_t p, std::span<const double> r0, std::span<const double> r1) {
                  std::copy(r0.begin(), r0.end(), out.data.begin() + static_cast<std::ptrdiff_t>(2 * p * n));
                  if (2 * p + 1 < count) {
                    std::copy(r1.begin(), r1.end(),
                              out.data.begin() + static_cast<std::ptrdiff_t>((2 * p + 1) * n));
                  }
                });
  return out;
}

namespace {

double hermite_sum(int q, std::span<const double> row) {
  double total = 0.0;
  for (double x : row) total += hermite(q, x);
  return total;
}

}  // namespace

SampleBatch sample_variation(const VariationSpec& spec, std::size_t count, std::uint64_t seed,
                             const SamplerOptions& options) {
  if (count < 1) throw DomainError("replicate count must be >= 1");
  const FgnGenerator gen(spec.hurst, spec.n, options.clip_tolerance);
  const double norm = 1.0 / std::sqrt(static_cast<double>(spec.n) * spec.v_n);
  SampleBatch batch{spec, std::vector<double>(count), seed, count};
  for_each_pair(gen, count, seed, options,
                [&](std::size_t p, std::span<const double> r0, std::span<const double> r1) {
                  batch.replicates[2 * p] = norm * hermite_sum(spec.q, r0);
                  if (2 * p + 1 < count) batch.replicates[2 * p + 1] = norm * hermite_sum(spec.q, r1);
                });
  return batch;
}

std::vector<double> sample_normal(double mean, std::size_t count, std::uint64_t seed) {
  const std::uint64_t key = stream_key(seed, 0x4E4F524D414CULL);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    CounterStream s(key, i);
    out[i] = mean + s.next_normal();
  }
  return out;
}

SampledCumulants sample_cumulants(std::span<const double> values, std::size_t batches) {
  if (values.size() < 2 * batches || batches < 2) {
    throw CapacityError("too few samples for batched cumulant estimates");
  }
  auto cumulants = [](std::span<const double> v) {
    CompensatedSum<> s1;
    for (double x : v) s1 += x;
    const double mean = s1.value() / static_cast<double>(v.size());
    CompensatedSum<> s2, s3, s4;
    for (double x : v) {
      const double d = x - mean;
      const double d2 = d * d;
      s2 += d2;
      s3 += d2 * d;
      s4 += d2 * d2;
    }
    const double len = static_cast<double>(v.size());
    const double m2 = s2.value() / len, m3 = s3.value() / len, m4 = s4.value() / len;
    return std::array<double, 3>{m2, m3, m4 - 3.0 * m2 * m2};
  };
  const auto all = cumulants(values);
  std::array<CompensatedSum<>, 3> sum, sq;
  const std::size_t per = values.size() / batches;
  for (std::size_t b = 0; b < batches; ++b) {
    const auto k = cumulants(values.subspan(b * per, per));
    for (int i = 0; i < 3; ++i) {
      sum[i] += k[i];
      sq[i] += k[i] * k[i];
    }
  }
  std::array<double, 3> se{};
  const double nb = static_cast<double>(batches);
  for (int i = 0; i < 3; ++i) {
    const double mean = sum[i].value() / nb;
    const double var = std::max(0.0, (sq[i].value() - nb * mean * mean) / (nb - 1.0));
    se[i] = std::sqrt(var / nb);
  }
  return SampledCumulants{all[0], all[1], all[2], se[0], se[1], se[2]};
}

}  // namespace fmtv
