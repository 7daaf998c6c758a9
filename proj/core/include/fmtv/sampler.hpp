#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fmtv/covariance.hpp"

namespace fmtv {

struct SamplerOptions {
  unsigned jobs = 1;
  /// Replicates per work item; each worker owns one FFT workspace.
  std::size_t block_size = 1024;
  /// Embedding eigenvalues in [-clip_tolerance, 0) are clipped to zero;
  /// anything more negative switches to the Cholesky path.
  double clip_tolerance = 1e-9;
};

/// Exact sampler for a stationary unit-variance Gaussian vector (X_0..X_{n-1}).
///
/// Primary method is circulant embedding: the first row
/// c_j = rho(min(j, M - j)) of an M-circulant, M >= 2(n-1), is diagonalized by
/// one FFT; one complex FFT of sqrt(lambda/M) * (Z1 + i Z2) then yields two
/// independent rows (real and imaginary parts). If the embedding is not PSD
/// the sampler factorizes the n x n Toeplitz covariance instead.
class FgnGenerator {
 public:
  /// fGn with Hurst index `hurst`; M is the next 2^a 3^b 5^c >= 2(n-1).
  FgnGenerator(Hurst hurst, std::size_t n, double clip_tolerance = 1e-9);
  /// Arbitrary correlation table with table.size() >= n; M = 2(n-1).
  FgnGenerator(const CovarianceTable& table, std::size_t n, double clip_tolerance = 1e-9);
  ~FgnGenerator();
  FgnGenerator(FgnGenerator&&) noexcept;
  FgnGenerator& operator=(FgnGenerator&&) noexcept;

  [[nodiscard]] std::size_t n() const;
  [[nodiscard]] std::size_t embedding_size() const;
  [[nodiscard]] bool uses_circulant() const;
  /// Smallest embedding eigenvalue before clipping (1 when n == 1).
  [[nodiscard]] double min_eigenvalue() const;

  class Workspace;
  struct WorkspaceDeleter {
    void operator()(Workspace* ws) const;
  };
  using WorkspacePtr = std::unique_ptr<Workspace, WorkspaceDeleter>;
  struct Impl;  // opaque
  [[nodiscard]] WorkspacePtr make_workspace() const;

  /// Two independent rows from the counter stream `key`. Deterministic in key.
  void generate_pair(std::uint64_t key, std::span<double> row0, std::span<double> row1,
                     Workspace& ws) const;

 private:
  std::unique_ptr<Impl> impl_;
};

/// Row-major count x n matrix of sampled paths.
struct SampleMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
};

/// `count` independent fGn rows. Rows 2p and 2p+1 come from stream
/// (seed, p), so the output does not depend on options.jobs.
SampleMatrix sample_fgn(Hurst hurst, std::size_t n, std::size_t count, std::uint64_t seed,
                        const SamplerOptions& options = {});

/// Replicates of F_n = (n v_n)^{-1/2} sum_{k<n} H_q(X_k).
struct SampleBatch {
  VariationSpec spec;
  std::vector<double> replicates;
  std::uint64_t seed = 0;
  std::size_t count = 0;
};

SampleBatch sample_variation(const VariationSpec& spec, std::size_t count, std::uint64_t seed,
                             const SamplerOptions& options = {});

/// count draws of N(mean, 1); value i depends only on (seed, i).
std::vector<double> sample_normal(double mean, std::size_t count, std::uint64_t seed);

/// Sample cumulants of orders 2..4 with standard errors from batch means.
struct SampledCumulants {
  double kappa2, kappa3, kappa4;
  double se2, se3, se4;
};
SampledCumulants sample_cumulants(std::span<const double> values, std::size_t batches = 100);

// Raw sample dumps. Binary layout, little-endian:
//   offset 0  char[4]  "FNSD"
//   offset 4  u32      format version (1)
//   offset 8  u32      q
//   offset 12 u32      n
//   offset 16 f64      H
//   offset 24 u64      count
//   offset 32 f64[count] replicates
inline constexpr std::uint32_t kSampleDumpVersion = 1;

void write_sample_dump(const std::filesystem::path& path, const SampleBatch& batch);
/// Reads a dump; the seed is not stored in the binary header and is set to 0.
SampleBatch read_sample_dump(const std::filesystem::path& path);
/// CSV alternative: a '#'-comment provenance line, header "F", one value per line.
void write_sample_csv(const std::filesystem::path& path, const SampleBatch& batch,
                      const std::string& provenance);
/// Reads the CSV form; the file does not carry the spec, so the caller supplies it.
SampleBatch read_sample_csv(const std::filesystem::path& path, const VariationSpec& spec);

}  // namespace fmtv
