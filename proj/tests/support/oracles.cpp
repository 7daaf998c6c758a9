#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace oracle {

double rho_direct(double hurst, long k) {
  const long double two_h = 2.0L * hurst;
  const long double a = std::fabs(static_cast<long double>(k) + 1);
  const long double b = std::fabs(static_cast<long double>(k));
  const long double c = std::fabs(static_cast<long double>(k) - 1);
  return static_cast<double>(0.5L * (std::pow(a, two_h) - 2.0L * std::pow(b, two_h) + std::pow(c, two_h)));
}

std::vector<double> hermite_coefficients(int q) {
  // H_q(x) = q! sum_j (-1)^j x^{q-2j} / (j! (q-2j)! 2^j)
  std::vector<double> c(q + 1, 0.0);
  auto fact = [](int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  for (int j = 0; 2 * j <= q; ++j) {
    c[q - 2 * j] = (j % 2 ? -1.0 : 1.0) * fact(q) / (fact(j) * fact(q - 2 * j) * std::pow(2.0, j));
  }
  return c;
}

double hermite_explicit(int q, double x) {
  const auto c = hermite_coefficients(q);
  double s = 0.0;
  for (int k = q; k >= 0; --k) s = s * x + c[k];
  return s;
}

namespace {

struct MomentSolver {
  const Matrix& cov;
  std::map<std::vector<int>, double> memo;

  double operator()(std::vector<int> p) {
    const int total = std::accumulate(p.begin(), p.end(), 0);
    if (total == 0) return 1.0;
    if (total % 2) return 0.0;
    if (auto it = memo.find(p); it != memo.end()) return it->second;
    const std::vector<int> key = p;
    std::size_t a = 0;
    while (p[a] == 0) ++a;
    --p[a];
    double s = 0.0;
    for (std::size_t b = 0; b < p.size(); ++b) {
      if (p[b] == 0) continue;
      const int mult = p[b];
      --p[b];
      s += mult * cov[a][b] * (*this)(p);
      ++p[b];
    }
    memo[key] = s;
    return s;
  }
};

}  // namespace

double gaussian_moment(const Matrix& cov, const std::vector<int>& powers) {
  MomentSolver solver{cov, {}};
  return solver(powers);
}

double joint_hermite_isserlis(int q, const Matrix& cov) {
  const std::size_t m = cov.size();
  const auto c = hermite_coefficients(q);
  MomentSolver solver{cov, {}};
  std::vector<int> powers(m, 0);
  // Sum over one monomial per factor.
  double total = 0.0;
  std::vector<int> choice(m, q);
  while (true) {
    double coef = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      coef *= c[choice[i]];
      powers[i] = choice[i];
    }
    if (coef != 0.0) total += coef * solver(powers);
    std::size_t i = 0;
    while (i < m) {
      if (choice[i] >= 2) {
        choice[i] -= 2;
        break;
      }
      choice[i] = q;
      ++i;
    }
    if (i == m) break;
  }
  return total;
}

namespace {

Matrix corr_of(double hurst, const std::vector<std::size_t>& idx) {
  Matrix r(idx.size(), std::vector<double>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j)
      r[i][j] = rho_direct(hurst, static_cast<long>(idx[i]) - static_cast<long>(idx[j]));
  return r;
}

struct Sums {
  double s2 = 0, s3 = 0, s4 = 0;
};

Sums raw_sums(int q, double hurst, std::size_t n, bool need4) {
  Sums s;
  // Memoize on the sorted index pattern shifted to start at 0.
  std::map<std::vector<std::size_t>, double> memo;
  auto moment = [&](std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end());
    const std::size_t base = idx.front();
    for (auto& v : idx) v -= base;
    if (auto it = memo.find(idx); it != memo.end()) return it->second;
    const double v = joint_hermite_isserlis(q, corr_of(hurst, idx));
    memo[idx] = v;
    return v;
  };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      s.s2 += moment({a, b});
      for (std::size_t c = 0; c < n; ++c) {
        s.s3 += moment({a, b, c});
        if (!need4) continue;
        for (std::size_t d = 0; d < n; ++d) s.s4 += moment({a, b, c, d});
      }
    }
  return s;
}

}  // namespace

Cumulants brute_cumulants(int q, double hurst, std::size_t n) {
  const Sums s = raw_sums(q, hurst, n, true);
  return Cumulants{1.0, s.s3 / std::pow(s.s2, 1.5), s.s4 / (s.s2 * s.s2) - 3.0};
}

double brute_moment4(int q, double hurst, std::size_t n) {
  const Sums s = raw_sums(q, hurst, n, true);
  return s.s4 / (s.s2 * s.s2);
}

double tv_shift_quadrature(double mu) {
  const double lo = -14.0, hi = 14.0 + mu;
  const int cells = 200000;
  const double h = (hi - lo) / cells;
  auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::acos(-1.0)); };
  auto f = [&](double x) { return std::fabs(phi(x - mu) - phi(x)); };
  double s = f(lo) + f(hi);
  for (int i = 1; i < cells; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return 0.5 * s * h / 3.0;
}

double kolmogorov_shift(double mu) {
  auto Phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  auto gap = [&](double x) { return std::fabs(Phi(x) - Phi(x - mu)); };
  double a = -5.0, b = 5.0 + mu;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (gap(c) > gap(d)) b = d; else a = c;
  }
  return gap(0.5 * (a + b));
}

}  // namespace oracle
