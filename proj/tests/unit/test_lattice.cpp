#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fmtv/errors.hpp"
#include "lattice.hpp"

using fmtv::detail::QuadCoefficients;

namespace {

std::vector<double> random_rho(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-0.6, 0.9);
  std::vector<double> r(n);
  r[0] = 1.0;
  for (std::size_t k = 1; k < n; ++k) r[k] = u(gen) / std::sqrt(static_cast<double>(k));
  return r;
}

// Random coefficients symmetric under permutations of (A, B, C).
QuadCoefficients random_symmetric(int q, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> u(-5, 9);
  QuadCoefficients c;
  c.q = q;
  std::array<std::array<std::array<double, 11>, 11>, 11> by_sorted{};
  for (int x = 0; x <= q; ++x)
    for (int y = 0; y <= q - x; ++y) {
      std::array<int, 3> t{x, y, q - x - y};
      std::sort(t.begin(), t.end());
      double& v = by_sorted[t[0]][t[1]][t[2]];
      if (v == 0.0) v = u(gen) + 0.5;
      c.coeff[x][y] = v;
    }
  return c;
}

struct BruteSum {
  double total;
  double magnitude;  // sum of |terms|: the scale of rounding error in any summation order
};

BruteSum brute_quad(const std::vector<double>& rho, std::size_t n, const QuadCoefficients& c) {
  auto r = [&](long a, long b) { return rho[static_cast<std::size_t>(std::abs(a - b))]; };
  long double total = 0.0L, magnitude = 0.0L;
  for (long a = 0; a < static_cast<long>(n); ++a)
    for (long b = 0; b < static_cast<long>(n); ++b)
      for (long d = 0; d < static_cast<long>(n); ++d)
        for (long e = 0; e < static_cast<long>(n); ++e) {
          // Sort the four positions; A, B, C are the three matchings.
          std::array<long, 4> p{a, b, d, e};
          std::sort(p.begin(), p.end());
          const double A = r(p[0], p[1]) * r(p[2], p[3]);
          const double B = r(p[0], p[2]) * r(p[1], p[3]);
          const double C = r(p[0], p[3]) * r(p[1], p[2]);
          long double pa[11], pb[11], pc[11];
          pa[0] = pb[0] = pc[0] = 1.0L;
          for (int k = 1; k <= c.q; ++k) {
            pa[k] = pa[k - 1] * A;
            pb[k] = pb[k - 1] * B;
            pc[k] = pc[k - 1] * C;
          }
          for (int x = 0; x <= c.q; ++x)
            for (int y = 0; y <= c.q - x; ++y) {
              const long double t = c.coeff[x][y] * pa[x] * pb[y] * pc[c.q - x - y];
              total += t;
              magnitude += std::abs(t);
            }
        }
  return {static_cast<double>(total), static_cast<double>(magnitude)};
}

double brute_triangle(const std::vector<double>& rho, std::size_t n, int e) {
  auto r = [&](long a, long b) { return rho[static_cast<std::size_t>(std::abs(a - b))]; };
  double total = 0.0;
  for (long a = 0; a < static_cast<long>(n); ++a)
    for (long b = 0; b < static_cast<long>(n); ++b)
      for (long c = 0; c < static_cast<long>(n); ++c) total += std::pow(r(a, b) * r(b, c) * r(a, c), e);
  return total;
}

}  // namespace

TEST_CASE("four-point lattice sum equals the brute-force quadruple sum") {
  for (int q = 1; q <= 10; ++q) {
    for (std::size_t n : {1UL, 2UL, 3UL, 9UL, 17UL, 40UL}) {
      const auto rho = random_rho(n, 100 + q);
      const auto c = random_symmetric(q, 7 * q);
      const BruteSum ref = brute_quad(rho, n, c);
      const double got = fmtv::detail::quad_lattice_sum(rho, n, c, 1);
      INFO("q=" << q << " n=" << n << " got " << got << " ref " << ref.total << " scale " << ref.magnitude);
      CHECK(std::abs(got - ref.total) <= 1e-13 * ref.magnitude);
    }
  }
}

TEST_CASE("three-point lattice sum equals the brute-force triple sum") {
  for (int e = 1; e <= 4; ++e)
    for (std::size_t n : {1UL, 5UL, 33UL}) {
      const auto rho = random_rho(n, e);
      CHECK(fmtv::detail::triangle_lattice_sum(rho, n, e, 1) == doctest::Approx(brute_triangle(rho, n, e)).epsilon(1e-12));
    }
}

TEST_CASE("lattice sums are bit-identical for any worker count") {
  const auto rho = random_rho(700, 3);
  const auto c = random_symmetric(4, 5);
  const double one = fmtv::detail::quad_lattice_sum(rho, 700, c, 1);
  for (unsigned jobs : {2u, 3u, 8u}) CHECK(fmtv::detail::quad_lattice_sum(rho, 700, c, jobs) == one);
  const double t1 = fmtv::detail::triangle_lattice_sum(rho, 700, 2, 1);
  CHECK(fmtv::detail::triangle_lattice_sum(rho, 700, 2, 5) == t1);
}

TEST_CASE("asymmetric coefficients are rejected") {
  QuadCoefficients c;
  c.q = 2;
  c.coeff[2][0] = 1.0;  // A^2 only
  const std::vector<double> rho = {1.0, 0.5, 0.2};
  CHECK_THROWS(fmtv::detail::quad_lattice_sum(rho, 3, c, 1));
  QuadCoefficients big;
  big.q = 11;
  CHECK_THROWS_AS(fmtv::detail::quad_lattice_sum(rho, 3, big, 1), fmtv::CapacityError);
}
