#include <cmath>
#include <random>

#include "doctest.h"
#include "fmtv/diagrams.hpp"
#include "fmtv/errors.hpp"
#include "fmtv/hermite.hpp"
#include "oracles.hpp"

using namespace fmtv;

TEST_CASE("q = 2 diagram counts and weights") {
  CHECK_NOTHROW(verify_diagram_weights());
  const auto two = enumerate_diagrams(2, 2, true);
  REQUIRE(two.size() == 1);
  CHECK(two[0].weight == 2.0);
  const auto three = enumerate_diagrams(3, 2, true);
  REQUIRE(three.size() == 1);
  CHECK(three[0].weight == 8.0);
  const auto four_conn = enumerate_diagrams(4, 2, true);
  CHECK(four_conn.size() == 3);
  for (const auto& d : four_conn) CHECK(d.weight == 16.0);
  const auto four_all = enumerate_diagrams(4, 2, false);
  CHECK(four_all.size() == 6);
  CHECK(enumerate_diagrams(3, 3, false).empty());
  CHECK_THROWS_AS(enumerate_diagrams(5, 2, true), DomainError);
}

TEST_CASE("diagram weights sum to the number of perfect matchings") {
  // With all correlations 1, E[prod H_q(X)] = E[H_q(N)^m]; the total weight
  // over all diagrams (no self lines) must equal it.
  for (int q = 1; q <= 5; ++q) {
    for (int m = 2; m <= 4; ++m) {
      double total = 0.0;
      for (const auto& d : enumerate_diagrams(m, q, false)) total += d.weight;
      oracle::Matrix ones(m, std::vector<double>(m, 1.0));
      CHECK(total == doctest::Approx(oracle::joint_hermite_isserlis(q, ones)));
    }
  }
}

TEST_CASE("joint moments agree with the Isserlis expansion") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 2 + trial % 3;
    const int q = 1 + trial % 4;
    // Random correlation matrix from normalized random vectors.
    std::vector<std::vector<double>> v(m, std::vector<double>(3));
    for (auto& row : v) {
      double s = 0;
      for (double& x : row) {
        x = u(gen);
        s += x * x;
      }
      for (double& x : row) x /= std::sqrt(s);
    }
    CorrelationMatrix r(m, std::vector<double>(m));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = 0;
        for (int k = 0; k < 3; ++k) s += v[i][k] * v[j][k];
        r[i][j] = i == j ? 1.0 : s;
      }
    const double ref = oracle::joint_hermite_isserlis(q, r);
    CHECK(joint_hermite_moment(q, r) == doctest::Approx(ref).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("joint moment input validation") {
  CHECK_THROWS_AS(joint_hermite_moment(2, {{1.0, 0.5}, {0.4, 1.0}}), DomainError);
  CHECK_THROWS_AS(joint_hermite_moment(2, {{1.0, 2.0}, {2.0, 1.0}}), DomainError);
  CHECK_THROWS_AS(joint_hermite_moment(2, {{0.9, 0.0}, {0.0, 1.0}}), DomainError);
  CHECK_THROWS_AS(joint_hermite_moment(2, {{1.0, 0.0}}), DomainError);
}

TEST_CASE("exact cumulants match brute-force tuple sums") {
  struct Case {
    int q;
    double h;
    std::size_t n;
  };
  for (const Case c : {Case{2, 0.5, 6}, Case{2, 0.3, 7}, Case{2, 0.7, 7}, Case{2, 0.9, 5}, Case{3, 0.6, 6},
                       Case{3, 0.2, 5}, Case{4, 0.65, 5}, Case{4, 0.4, 4}, Case{5, 0.8, 4}}) {
    const auto spec = VariationSpec::make(c.q, c.h, c.n);
    const auto got = exact_cumulants(spec);
    const auto ref = oracle::brute_cumulants(c.q, c.h, c.n);
    INFO("q=" << c.q << " H=" << c.h << " n=" << c.n);
    CHECK(got.kappa2 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(got.kappa3 == doctest::Approx(ref.kappa3).epsilon(1e-11).scale(1e-12));
    CHECK(got.kappa4 == doctest::Approx(ref.kappa4).epsilon(1e-11));
    CHECK(moment4_all_diagrams(spec) == doctest::Approx(oracle::brute_moment4(c.q, c.h, c.n)).epsilon(1e-12));
  }
}

TEST_CASE("iid case: chi-square cumulants, confirmed by Monte Carlo") {
  // F_n = (2n)^{-1/2} sum (X_k^2 - 1) with iid X_k: kappa3 = sqrt(8/n), kappa4 = 12/n.
  for (std::size_t n : {4UL, 10UL, 100UL}) {
    const auto r = exact_cumulants(VariationSpec::make(2, 0.5, n));
    CHECK(r.kappa3 == doctest::Approx(std::sqrt(8.0 / n)).epsilon(1e-12));
    CHECK(r.kappa4 == doctest::Approx(12.0 / n).epsilon(1e-12));
    CHECK(r.m_stat == doctest::Approx(std::max(std::sqrt(8.0 / n), 12.0 / n)));
  }
  // Monte Carlo with an unrelated generator, n = 10.
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> z;
  const std::size_t n = 10, reps = 400000, batches = 40;
  std::vector<double> k3(batches, 0.0), k4(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    double m2 = 0, m3 = 0, m4 = 0;
    const std::size_t per = reps / batches;
    for (std::size_t r = 0; r < per; ++r) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const double x = z(gen);
        s += x * x - 1;
      }
      const double f = s / std::sqrt(2.0 * n);
      m2 += f * f;
      m3 += f * f * f;
      m4 += f * f * f * f;
    }
    m2 /= per;
    m3 /= per;
    m4 /= per;
    k3[b] = m3;
    k4[b] = m4 - 3 * m2 * m2;
  }
  auto mean_se = [](const std::vector<double>& v) {
    double m = 0, s = 0;
    for (double x : v) m += x;
    m /= v.size();
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, std::sqrt(s / (v.size() - 1) / v.size())};
  };
  const auto [m3, se3] = mean_se(k3);
  const auto [m4, se4] = mean_se(k4);
  CHECK(std::abs(m3 - std::sqrt(0.8)) < 4 * se3);
  CHECK(std::abs(m4 - 1.2) < 4 * se4);
}

TEST_CASE("odd q has identically zero third cumulant") {
  for (int q : {3, 5, 7})
    for (double h : {0.3, 0.5, 0.8})
      for (std::size_t n : {2UL, 9UL, 64UL}) CHECK(exact_cumulants(VariationSpec::make(q, h, n)).kappa3 == 0.0);
}

TEST_CASE("results do not depend on the worker count") {
  const auto spec = VariationSpec::make(3, 0.7, 300);
  const auto a = exact_cumulants(spec, LatticeOptions{8192, 1});
  const auto b = exact_cumulants(spec, LatticeOptions{8192, 4});
  CHECK(a.kappa4 == b.kappa4);
  CHECK(a.kappa3 == b.kappa3);
}

TEST_CASE("capacity limits") {
  CHECK_THROWS_AS(exact_cumulants(VariationSpec::make(2, 0.5, 100), LatticeOptions{64, 1}), CapacityError);
  CHECK_THROWS_AS(exact_cumulants(VariationSpec::make(kMaxExactDegree + 1, 0.5, 10)), CapacityError);
  CHECK_NOTHROW(exact_cumulants(VariationSpec::make(kMaxExactDegree, 0.6, 20)));
}
