#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fmtv {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

double normal_pdf(double x);
double normal_cdf(double x);

/// Inverse of the standard normal CDF (Wichura's AS241, ~1e-16 relative).
/// Defined for p in (0, 1); returns +-infinity at the endpoints.
double normal_quantile(double p);

/// Gauss-Hermite rule for the standard Gaussian weight exp(-x^2/2)/sqrt(2 pi):
/// sum_i weights[i] f(nodes[i]) approximates E[f(N)]. Built by Golub-Welsch on
/// the probabilists' Jacobi matrix, so the weights sum to 1.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  double expectation(const std::function<double(double)>& f) const;
};

/// Cached per node count; safe for concurrent callers.
const GaussHermiteRule& gauss_hermite(std::size_t nodes);

}  // namespace fmtv
