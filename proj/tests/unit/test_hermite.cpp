#include <cmath>
#include <vector>

#include "doctest.h"
#include "fmtv/errors.hpp"
#include "fmtv/hermite.hpp"
#include "fmtv/normal.hpp"
#include "oracles.hpp"

using fmtv::hermite;

TEST_CASE("low-order values match the closed forms") {
  for (double x : {-2.5, -1.0, 0.0, 0.3, 1.7}) {
    CHECK(hermite(0, x) == 1.0);
    CHECK(hermite(1, x) == x);
    CHECK(hermite(2, x) == doctest::Approx(x * x - 1));
    CHECK(hermite(3, x) == doctest::Approx(x * x * x - 3 * x));
    CHECK(hermite(4, x) == doctest::Approx(x * x * x * x - 6 * x * x + 3));
  }
}

TEST_CASE("recurrence agrees with the explicit sum up to q = 12") {
  for (int q = 0; q <= 12; ++q) {
    for (double x : {-3.0, -0.7, 0.1, 1.3, 2.9}) {
      const double ref = oracle::hermite_explicit(q, x);
      CHECK(hermite(q, x) == doctest::Approx(ref).epsilon(1e-12).scale(std::pow(3.5, q)));
    }
  }
}

TEST_CASE("orthogonality under the Gaussian weight") {
  const auto& rule = fmtv::gauss_hermite(64);
  for (int p = 0; p <= 8; ++p) {
    for (int q = 0; q <= 8; ++q) {
      const double e = rule.expectation([&](double x) { return hermite(p, x) * hermite(q, x); });
      const double want = p == q ? std::tgamma(q + 1.0) : 0.0;
      // Rounding scales with the size of the products, sqrt(p! q!).
      CHECK(e == doctest::Approx(want).scale(std::sqrt(std::tgamma(p + 1.0) * std::tgamma(q + 1.0))).epsilon(1e-12));
    }
  }
}

TEST_CASE("derivative is q H_{q-1}") {
  for (int q = 1; q <= 9; ++q) {
    const double x = 0.83;
    const double h = 1e-5;
    const double fd = (hermite(q, x + h) - hermite(q, x - h)) / (2 * h);
    CHECK(fmtv::hermite_derivative(q, x) == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK(fmtv::hermite_derivative(0, 1.2) == 0.0);
}

TEST_CASE("hermite_all and hermite_batch agree with the scalar routine") {
  std::vector<double> out(8);
  fmtv::hermite_all(7, 1.1, out);
  for (int q = 0; q <= 7; ++q) CHECK(out[q] == hermite(q, 1.1));
  const std::vector<double> xs = {-1.0, 0.0, 0.5, 2.0};
  const auto ys = fmtv::hermite_batch(5, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(ys[i] == hermite(5, xs[i]));
}

TEST_CASE("negative degree is rejected") {
  CHECK_THROWS_AS(hermite(-1, 0.0), fmtv::DomainError);
  std::vector<double> small(2);
  CHECK_THROWS(fmtv::hermite_all(3, 0.0, small));
}
