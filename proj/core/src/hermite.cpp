#include "fmtv/hermite.hpp"

#include "fmtv/errors.hpp"

namespace fmtv {

namespace {

void require_degree(int q) {
  if (q < 0) throw DomainError("Hermite degree must be non-negative");
}

}  // namespace

double hermite(int q, double x) {
  require_degree(q);
  if (q == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < q; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_derivative(int q, double x) {
  require_degree(q);
  return q == 0 ? 0.0 : q * hermite(q - 1, x);
}

void hermite_all(int q, double x, std::span<double> out) {
  require_degree(q);
  if (out.size() < static_cast<std::size_t>(q) + 1) {
    throw DomainError("hermite_all: output span too short");
  }
  out[0] = 1.0;
  if (q == 0) return;
  out[1] = x;
  for (int k = 1; k < q; ++k) out[k + 1] = x * out[k] - k * out[k - 1];
}

std::vector<double> hermite_batch(int q, std::span<const double> xs) {
  require_degree(q);
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(hermite(q, x));
  return out;
}

}  // namespace fmtv
