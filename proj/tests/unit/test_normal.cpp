#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "doctest.h"
#include "fmtv/errors.hpp"
#include "fmtv/normal.hpp"
#include "fmtv/rng.hpp"

TEST_CASE("quantile matches Boost across the unit interval") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double p = u(gen);
    const double ref = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
    const double got = fmtv::normal_quantile(p);
    worst = std::max(worst, std::abs(got - ref) / std::max(1.0, std::abs(ref)));
  }
  CHECK(worst < 1e-14);
  for (double p : {1e-300, 1e-100, 1e-20, 1e-10, 1 - 1e-10}) {
    const double ref = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
    CHECK(fmtv::normal_quantile(p) == doctest::Approx(ref).epsilon(1e-13));
  }
}

TEST_CASE("quantile inverts the CDF and handles the endpoints") {
  for (double x : {-6.0, -1.5, 0.0, 0.25, 3.0}) {
    CHECK(fmtv::normal_quantile(fmtv::normal_cdf(x)) == doctest::Approx(x).epsilon(1e-12));
  }
  CHECK(fmtv::normal_quantile(0.0) == -std::numeric_limits<double>::infinity());
  CHECK(fmtv::normal_quantile(1.0) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(fmtv::normal_quantile(-0.1), fmtv::DomainError);
  CHECK_THROWS_AS(fmtv::normal_quantile(1.5), fmtv::DomainError);
  CHECK(fmtv::normal_quantile(0.5) == 0.0);
}

TEST_CASE("Gauss-Hermite rule integrates Gaussian moments") {
  const auto& rule = fmtv::gauss_hermite(40);
  double wsum = 0.0;
  for (double w : rule.weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
  double dfact = 1.0;  // (2k-1)!!
  for (int k = 1; k <= 10; ++k) {
    dfact *= 2 * k - 1;
    const double e = rule.expectation([&](double x) { return std::pow(x, 2 * k); });
    CHECK(e == doctest::Approx(dfact).epsilon(1e-11));
  }
  CHECK(rule.expectation([](double x) { return std::cos(x); }) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(&fmtv::gauss_hermite(40) == &rule);
}

TEST_CASE("counter stream is random access and deterministic") {
  fmtv::CounterStream a(fmtv::stream_key(42, 3));
  std::vector<double> first;
  for (int i = 0; i < 10; ++i) first.push_back(a.next_uniform());
  fmtv::CounterStream b(fmtv::stream_key(42, 3), 5);
  for (int i = 5; i < 10; ++i) CHECK(b.next_uniform() == first[i]);
  for (double u : first) CHECK((u > 0.0 && u < 1.0));
  CHECK(fmtv::stream_key(42, 3) != fmtv::stream_key(42, 4));
  CHECK(fmtv::stream_key(42, 3) != fmtv::stream_key(43, 3));
}

TEST_CASE("counter stream normals have unit variance and no lag correlation") {
  fmtv::CounterStream s(fmtv::stream_key(9, 0));
  const int n = 200000;
  double m = 0, v = 0, lag = 0, prev = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s.next_normal();
    m += z;
    v += z * z;
    lag += z * prev;
    prev = z;
  }
  m /= n;
  v /= n;
  lag /= n;
  CHECK(std::abs(m) < 4.0 / std::sqrt(n));
  CHECK(std::abs(v - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(lag) < 4.0 / std::sqrt(n));
}
