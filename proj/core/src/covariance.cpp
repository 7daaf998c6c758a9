#include "fmtv/covariance.hpp"

#include <cmath>
#include <string>

#include "fmtv/compensated_sum.hpp"
#include "fmtv/errors.hpp"

namespace fmtv {

Hurst::Hurst(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) {
    throw DomainError("Hurst index must lie in (0, 1), got " + std::to_string(value));
  }
}

double fgn_rho(Hurst hurst, long k) {
  const double alpha = 2.0 * hurst.value();
  const double a = std::abs(static_cast<double>(k));
  if (a == 0.0) return 1.0;
  if (a < 4.0) {
    return 0.5 * (std::pow(a + 1.0, alpha) - 2.0 * std::pow(a, alpha) + std::pow(a - 1.0, alpha));
  }
  // (1+u)^a + (1-u)^a - 2 = 2 sum_{j>=1} C(a, 2j) u^{2j}, u = 1/|k| <= 1/4.
  const double u2 = 1.0 / (a * a);
  double coeff = 1.0;  // C(alpha, 0)
  double power = 1.0;
  double series = 0.0;
  for (int j = 1; j <= 40; ++j) {
    coeff *= (alpha - (2 * j - 2)) * (alpha - (2 * j - 1)) / ((2.0 * j - 1.0) * (2.0 * j));
    power *= u2;
    const double term = coeff * power;
    series += term;
    if (std::abs(term) <= 1e-18 * std::abs(series)) break;
  }
  return std::pow(a, alpha) * series;
}

CovarianceTable::CovarianceTable(Hurst hurst, std::size_t size) {
  lags_.resize(size);
  for (std::size_t k = 0; k < size; ++k) lags_[k] = fgn_rho(hurst, static_cast<long>(k));
}

CovarianceTable CovarianceTable::from_values(std::vector<double> lags) {
  if (lags.empty() || lags[0] != 1.0) {
    throw DomainError("correlation table must start with rho(0) = 1");
  }
  for (double r : lags) {
    if (!(r >= -1.0 && r <= 1.0)) throw DomainError("correlation outside [-1, 1]");
  }
  return CovarianceTable(std::move(lags));
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double variance_norm(int q, const CovarianceTable& rho, std::size_t n) {
  if (q < 1) throw DomainError("variance_norm requires q >= 1");
  if (n < 1) throw DomainError("variance_norm requires n >= 1");
  if (rho.size() < n) throw DomainError("covariance table shorter than n");
  CompensatedSum<> acc(static_cast<double>(n));
  for (std::size_t k = 1; k < n; ++k) {
    acc += 2.0 * static_cast<double>(n - k) * std::pow(rho(static_cast<long>(k)), q);
  }
  return factorial(q) * acc.value() / static_cast<double>(n);
}

double variance_norm(int q, Hurst hurst, std::size_t n) {
  return variance_norm(q, CovarianceTable(hurst, n), n);
}

double variance_norm_limit(int q, Hurst hurst, std::size_t lags) {
  CompensatedSum<> acc(1.0);
  for (std::size_t k = 1; k < lags; ++k) acc += 2.0 * std::pow(fgn_rho(hurst, static_cast<long>(k)), q);
  return factorial(q) * acc.value();
}

VariationSpec VariationSpec::make(int q, double hurst, std::size_t n) {
  if (q < 2) throw DomainError("Hermite degree q must be >= 2");
  if (n < 1) throw DomainError("sample size n must be >= 1");
  const Hurst h(hurst);
  return VariationSpec{q, h, n, variance_norm(q, h, n)};
}

bool VariationSpec::in_clt_regime() const {
  return hurst.value() <= 1.0 - 1.0 / (2.0 * q) + 1e-12;
}

}  // namespace fmtv
