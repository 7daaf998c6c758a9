#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fmtv/diagrams.hpp"
#include "fmtv/errors.hpp"
#include "fmtv/sampler.hpp"

using namespace fmtv;

namespace {

struct LagEstimate {
  double value, se;
};

// Mean of X_i X_{i+k} over positions, averaged over rows; the SE treats row
// averages as iid.
LagEstimate lag_product(const SampleMatrix& m, std::size_t k) {
  double s = 0, s2 = 0;
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto row = m.row(r);
    double acc = 0;
    for (std::size_t i = 0; i + k < m.cols; ++i) acc += row[i] * row[i + k];
    acc /= static_cast<double>(m.cols - k);
    s += acc;
    s2 += acc * acc;
  }
  const double n = static_cast<double>(m.rows);
  const double mean = s / n;
  return {mean, std::sqrt((s2 / n - mean * mean) / (n - 1))};
}

std::filesystem::path temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "fmtv_unit_sampler";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("iid rows at H = 1/2") {
  const auto m = sample_fgn(Hurst(0.5), 64, 20000, 5);
  const auto v = lag_product(m, 0);
  CHECK(std::abs(v.value - 1.0) < 4 * v.se);
  for (std::size_t k : {1UL, 2UL, 7UL}) {
    const auto c = lag_product(m, k);
    CHECK(std::abs(c.value) < 4 * c.se);
  }
}

TEST_CASE("lag correlations at H = 0.75 and H = 0.3") {
  for (double h : {0.75, 0.3}) {
    const auto m = sample_fgn(Hurst(h), 128, 20000, 17);
    for (std::size_t k : {0UL, 1UL, 2UL, 5UL}) {
      const auto c = lag_product(m, k);
      INFO("H=" << h << " k=" << k);
      CHECK(std::abs(c.value - fgn_rho(Hurst(h), static_cast<long>(k))) < 4 * c.se);
    }
  }
  CHECK(fgn_rho(Hurst(0.75), 1) == doctest::Approx(std::sqrt(2.0) - 1));
}

TEST_CASE("circulant embedding stays non-negative on the H grid") {
  for (int i = 1; i <= 9; ++i) {
    const double h = 0.1 * i;
    for (std::size_t n : {2UL, 3UL, 17UL, 1000UL, 1UL << 14}) {
      const FgnGenerator g(Hurst(h), n);
      INFO("H=" << h << " n=" << n);
      CHECK(g.uses_circulant());
      CHECK(g.min_eigenvalue() >= -1e-9);
      CHECK(g.embedding_size() >= 2 * (n - 1));
    }
  }
}

TEST_CASE("output is independent of worker count and block size") {
  const auto a = sample_fgn(Hurst(0.7), 100, 257, 99, SamplerOptions{1, 1024, 1e-9});
  const auto b = sample_fgn(Hurst(0.7), 100, 257, 99, SamplerOptions{3, 16, 1e-9});
  const auto c = sample_fgn(Hurst(0.7), 100, 257, 99, SamplerOptions{8, 5, 1e-9});
  CHECK(a.data == b.data);
  CHECK(a.data == c.data);
  const auto d = sample_fgn(Hurst(0.7), 100, 257, 100);
  CHECK(a.data != d.data);
  // A prefix of a larger draw is the smaller draw.
  const auto e = sample_fgn(Hurst(0.7), 100, 300, 99);
  CHECK(std::equal(a.data.begin(), a.data.end(), e.data.begin()));
}

TEST_CASE("Cholesky fallback when the embedding is indefinite") {
  // Positive definite Toeplitz matrix whose 4-point circulant has eigenvalue -0.3.
  const auto table = CovarianceTable::from_values({1.0, 0.5, -0.3});
  const FgnGenerator g(table, 3);
  CHECK_FALSE(g.uses_circulant());
  CHECK(g.min_eigenvalue() == doctest::Approx(-0.3));
  auto ws = g.make_workspace();
  std::vector<double> r0(3), r1(3);
  double c1 = 0, c2 = 0;
  const int pairs = 50000;
  for (int p = 0; p < pairs; ++p) {
    g.generate_pair(static_cast<std::uint64_t>(p) * 7919 + 1, r0, r1, *ws);
    c1 += r0[0] * r0[1] + r1[1] * r1[2];
    c2 += r0[0] * r0[2] + r1[0] * r1[2];
  }
  CHECK(c1 / (2 * pairs) == doctest::Approx(0.5).epsilon(0.05));
  CHECK(c2 / (2 * pairs) == doctest::Approx(-0.3).epsilon(0.05));
}

TEST_CASE("non positive definite tables are fatal") {
  const auto bad = CovarianceTable::from_values({1.0, 0.9, -0.9});
  CHECK_THROWS_AS(FgnGenerator(bad, 3), CovarianceError);
  CHECK_THROWS_AS(FgnGenerator(CovarianceTable::from_values({1.0, 0.5}), 3), DomainError);
}

TEST_CASE("n = 1 fourth moment is 15") {
  const auto b = sample_variation(VariationSpec::make(2, 0.5, 1), 1000000, 3);
  double m4 = 0, m8 = 0;
  for (double f : b.replicates) {
    const double f4 = f * f * f * f;
    m4 += f4;
    m8 += f4 * f4;
  }
  const double n = static_cast<double>(b.count);
  m4 /= n;
  const double se = std::sqrt((m8 / n - m4 * m4) / n);
  CHECK(std::abs(m4 - 15.0) < 4 * se);
}

TEST_CASE("replicates are centered with unit variance") {
  const auto b = sample_variation(VariationSpec::make(3, 0.6, 50), 200000, 8);
  CHECK(b.count == b.replicates.size());
  const auto sc = sample_cumulants(b.replicates);
  double mean = 0;
  for (double f : b.replicates) mean += f;
  mean /= static_cast<double>(b.count);
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(b.count)));
  CHECK(std::abs(sc.kappa2 - 1.0) < 4 * sc.se2);
}

TEST_CASE("sampled third cumulant at n = 1000 matches the exact value") {
  const auto spec = VariationSpec::make(2, 0.5, 1000);
  const auto b = sample_variation(spec, 100000, 21);
  const auto sc = sample_cumulants(b.replicates);
  CHECK(std::abs(sc.kappa3 - std::sqrt(8.0 / 1000)) < 4 * sc.se3);
}

TEST_CASE("normal draws are random access") {
  const auto a = sample_normal(1.0, 1000, 4);
  const auto b = sample_normal(1.0, 10, 4);
  CHECK(std::equal(b.begin(), b.end(), a.begin()));
  double m = 0;
  for (double x : a) m += x;
  CHECK(m / 1000 == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("sample dump round trip") {
  const auto b = sample_variation(VariationSpec::make(2, 0.7, 33), 101, 6);
  const auto path = temp_file("dump.fnsd");
  write_sample_dump(path, b);
  CHECK(std::filesystem::file_size(path) == 32 + 8 * 101);
  const auto back = read_sample_dump(path);
  CHECK(back.replicates == b.replicates);
  CHECK(back.spec.q == 2);
  CHECK(back.spec.n == 33);
  CHECK(back.spec.hurst.value() == 0.7);

  const auto csv = temp_file("dump.csv");
  write_sample_csv(csv, b, "unit test");
  CHECK(read_sample_csv(csv, b.spec).replicates == b.replicates);

  std::filesystem::resize_file(path, 40);
  CHECK_THROWS_AS(read_sample_dump(path), CapacityError);
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "NOPE0000000000000000000000000000";
  }
  CHECK_THROWS_AS(read_sample_dump(path), CapacityError);
}
