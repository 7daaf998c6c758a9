#include <cmath>

#include "doctest.h"
#include "fmtv/errors.hpp"
#include "fmtv/hermite.hpp"
#include "fmtv/normal.hpp"
#include "fmtv/stein.hpp"

using namespace fmtv;

namespace {
// E[g(N)] by composite Simpson on [-14, 14].
template <typename G>
double simpson_expectation(G g) {
  const int cells = 40000;
  const double lo = -14.0, h = 28.0 / cells;
  double s = 0.0;
  for (int i = 0; i <= cells; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == cells) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * g(x) * std::exp(-0.5 * x * x);
  }
  return s * h / 3.0 / std::sqrt(2.0 * M_PI);
}
}  // namespace

TEST_CASE("polynomial test functions have polynomial solutions") {
  // h = x gives f = -1; h = x^2 - 1 gives f = -x.
  const auto lin = stein_solve([](double x) { return x; });
  const auto quad = stein_solve([](double x) { return x * x; });
  CHECK(lin.g_mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(quad.g_mean == doctest::Approx(1.0).epsilon(1e-12));
  double err_lin = 0, err_quad = 0;
  for (std::size_t i = 0; i < lin.grid.size(); ++i) {
    if (std::abs(lin.grid[i]) > 6.0) continue;
    err_lin = std::max(err_lin, std::abs(lin.values[i] + 1.0));
    err_quad = std::max(err_quad, std::abs(quad.values[i] + quad.grid[i]));
  }
  CHECK(err_lin < 1e-8);
  CHECK(err_quad < 1e-8);
}

TEST_CASE("solutions satisfy the Stein equation") {
  for (const auto& [name, g] : stein_dictionary()) {
    INFO(name);
    const auto sol = stein_solve(g);
    CHECK(ode_residual(sol) < 1e-6);
  }
}

TEST_CASE("one-sided forms agree with split near zero") {
  const auto g = [](double x) { return std::tanh(x); };
  const auto split = stein_solve(g);
  const auto left = stein_solve(g, {}, {SteinForm::left_tail, 200});
  const auto right = stein_solve(g, {}, {SteinForm::right_tail, 200});
  for (std::size_t i = 0; i < split.grid.size(); ++i) {
    if (std::abs(split.grid[i]) > 2.0) continue;
    CHECK(left.values[i] == doctest::Approx(split.values[i]).epsilon(1e-8));
    CHECK(right.values[i] == doctest::Approx(split.values[i]).epsilon(1e-8));
  }
}

TEST_CASE("constants of the sine solution") {
  // E[sin N H_3(N)] = E[N^3 sin N] - 3 E[N sin N] = 2/sqrt(e) - 3/sqrt(e).
  const double sin_h3 = simpson_expectation([](double x) { return std::sin(x) * (x * x * x - 3 * x); });
  CHECK(sin_h3 == doctest::Approx(-std::exp(-0.5)).epsilon(1e-11));
  const double m2_closed = std::exp(-0.5) / 3.0;
  CHECK(m2_closed == doctest::Approx(0.20217688).epsilon(1e-7));

  const FsinConstants c = fsin_constants();
  CHECK(c.m2 == doctest::Approx(m2_closed).epsilon(1e-12));
  CHECK(c.m2_direct == doctest::Approx(m2_closed).epsilon(1e-6));
  CHECK(std::abs(c.m3) < 1e-12);
  CHECK(std::abs(c.m3_direct) < 1e-6);
  CHECK(c.sup2 <= 2.0);
  CHECK(c.sup3 <= 2.0);
  CHECK(c.sup2_fd == doctest::Approx(c.sup2).epsilon(1e-4));
  CHECK(c.sup3_fd == doctest::Approx(c.sup3).epsilon(1e-4));
}

TEST_CASE("dictionary respects the classical sup-norm bounds") {
  for (const auto& [name, g] : stein_dictionary()) {
    INFO(name);
    const auto r = stein_bound_check(stein_solve(g));
    CHECK(r.ratio_f <= std::sqrt(M_PI / 2.0) + 1e-9);
    CHECK(r.ratio_fprime <= 2.0 + 1e-9);
    CHECK(r.ratio_f > 0.0);
  }
  const auto zero = stein_bound_check(stein_solve([](double) { return 3.0; }));
  CHECK(zero.ratio_f == 0.0);
  CHECK(zero.ratio_fprime == 0.0);
}

TEST_CASE("quadrature is converged at 200 nodes") {
  for (const auto& [name, g] : stein_dictionary()) {
    INFO(name);
    const double a = gauss_hermite(200).expectation(g);
    const double b = gauss_hermite(400).expectation(g);
    CHECK(std::abs(a - b) < 1e-12);
    CHECK(a == doctest::Approx(simpson_expectation(g)).epsilon(1e-10));
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(stein_solve([](double x) { return std::exp(x * x); }), DomainError);
  CHECK_THROWS_AS(stein_solve([](double) { return NAN; }), DomainError);
  SteinGrid narrow;
  narrow.lo = -4.0;
  CHECK_THROWS_AS(stein_solve([](double x) { return std::sin(x); }, narrow), DomainError);
}
