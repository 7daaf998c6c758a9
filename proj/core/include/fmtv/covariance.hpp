#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fmtv {

/// Hurst index of a fractional Brownian motion, validated to lie in (0, 1).
class Hurst {
 public:
  Hurst() = default;  // 0.5, standard Brownian motion
  explicit Hurst(double value);
  [[nodiscard]] double value() const { return value_; }

 private:
  double value_ = 0.5;
};

/// Correlation of fractional Gaussian noise X_k = B_H(k+1) - B_H(k):
///   rho(k) = (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
/// For |k| >= 4 the second difference is summed as the binomial series
///   |k|^{2H} sum_{j>=1} C(2H, 2j) k^{-2j},
/// whose terms share one sign, so the k^{2H-2} tail keeps full precision.
double fgn_rho(Hurst hurst, long k);

/// Dense table rho(0), ..., rho(size-1) of a stationary unit-variance sequence.
class CovarianceTable {
 public:
  /// fGn correlations for lags 0..size-1.
  CovarianceTable(Hurst hurst, std::size_t size);

  /// User-supplied correlations; lag0 must equal 1. Positive-definiteness is
  /// not checked here (the sampler's embedding check catches violations).
  static CovarianceTable from_values(std::vector<double> lags);

  [[nodiscard]] double operator()(long k) const {
    const auto a = static_cast<std::size_t>(k < 0 ? -k : k);
    return lags_[a];
  }
  [[nodiscard]] std::size_t size() const { return lags_.size(); }
  [[nodiscard]] std::span<const double> lags() const { return lags_; }

 private:
  explicit CovarianceTable(std::vector<double> lags) : lags_(std::move(lags)) {}
  std::vector<double> lags_;
};

double factorial(int k);

/// v_n = (q!/n) sum_{|k|<n} (n-|k|) rho(k)^q, the normalization making
/// F_n = (n v_n)^{-1/2} sum_{k<n} H_q(X_k) unit-variance.
double variance_norm(int q, const CovarianceTable& rho, std::size_t n);
double variance_norm(int q, Hurst hurst, std::size_t n);

/// q! sum_{k in Z} rho(k)^q truncated at |k| < lags; the n -> infinity limit
/// of v_n when 0 < H < 1 - 1/(2q).
double variance_norm_limit(int q, Hurst hurst, std::size_t lags);

/// The triple (q, H, n) defining F_n, with its normalization v_n.
struct VariationSpec {
  int q = 0;
  Hurst hurst;
  std::size_t n = 0;
  double v_n = 0.0;

  /// Validates q >= 2 and n >= 1 and computes v_n.
  static VariationSpec make(int q, double hurst, std::size_t n);

  /// True when H <= 1 - 1/(2q), where F_n satisfies the Breuer-Major CLT.
  [[nodiscard]] bool in_clt_regime() const;
};

}  // namespace fmtv
