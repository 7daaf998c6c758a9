#include "fmtv/diagrams.hpp"

#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fmtv/compensated_sum.hpp"
#include "fmtv/errors.hpp"
#include "lattice.hpp"

namespace fmtv {

namespace {

bool is_connected(const Diagram& d) {
  std::array<int, 4> parent{0, 1, 2, 3};
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < d.m; ++i)
    for (int j = i + 1; j < d.m; ++j)
      if (d.edges[i][j] > 0) parent[find(i)] = find(j);
  const int root = find(0);
  for (int i = 1; i < d.m; ++i)
    if (find(i) != root) return false;
  return true;
}

double diagram_weight(const Diagram& d, int q) {
  double w = 1.0;
  for (int i = 0; i < d.m; ++i) {
    double denom = 1.0;
    for (int j = 0; j < d.m; ++j)
      if (j != i) denom *= factorial(d.edges[i][j]);
    w *= factorial(q) / denom;
  }
  for (int i = 0; i < d.m; ++i)
    for (int j = i + 1; j < d.m; ++j) w *= factorial(d.edges[i][j]);
  return std::round(w);
}

Diagram finish(Diagram d, int q) {
  for (int i = 0; i < d.m; ++i)
    for (int j = 0; j < i; ++j) d.edges[i][j] = d.edges[j][i];
  for (int i = 0; i < d.m; ++i) {
    int row = 0;
    for (int j = 0; j < d.m; ++j) row += d.edges[i][j];
    if (row != q) throw std::logic_error("diagram row sum mismatch");
  }
  d.weight = diagram_weight(d, q);
  d.connected = is_connected(d);
  return d;
}

}  // namespace

std::vector<Diagram> enumerate_diagrams(int m, int q, bool connected_only) {
  if (m < 2 || m > 4) throw DomainError("diagrams are enumerated for 2, 3 or 4 nodes only");
  if (q < 1) throw DomainError("diagram degree must be >= 1");
  std::vector<Diagram> out;
  auto push = [&](Diagram d) {
    d = finish(d, q);
    if (!connected_only || d.connected) out.push_back(d);
  };
  if (m == 2) {
    Diagram d;
    d.m = 2;
    d.edges[0][1] = q;
    push(d);
  } else if (m == 3) {
    // e01 + e02 = e01 + e12 = e02 + e12 = q forces every edge to q/2.
    if (q % 2 == 0) {
      Diagram d;
      d.m = 3;
      d.edges[0][1] = d.edges[0][2] = d.edges[1][2] = q / 2;
      push(d);
    }
  } else {
    // Row sums force e01 = e23, e02 = e13, e03 = e12; scan (e01, e02).
    for (int x = 0; x <= q; ++x) {
      for (int y = 0; x + y <= q; ++y) {
        Diagram d;
        d.m = 4;
        d.edges[0][1] = d.edges[2][3] = x;
        d.edges[0][2] = d.edges[1][3] = y;
        d.edges[0][3] = d.edges[1][2] = q - x - y;
        push(d);
      }
    }
  }
  return out;
}

double joint_hermite_moment(int q, const CorrelationMatrix& rho) {
  const int m = static_cast<int>(rho.size());
  if (m < 2 || m > 4) throw DomainError("joint_hermite_moment supports 2 to 4 variables");
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(rho[i].size()) != m) throw DomainError("correlation matrix is not square");
    if (rho[i][i] != 1.0) throw DomainError("correlation matrix needs a unit diagonal");
    for (int j = 0; j < m; ++j) {
      if (rho[i][j] != rho[j][i]) throw DomainError("correlation matrix is not symmetric");
      if (!(rho[i][j] >= -1.0 && rho[i][j] <= 1.0)) throw DomainError("correlation outside [-1, 1]");
    }
  }
  double total = 0.0;
  for (const Diagram& d : enumerate_diagrams(m, q, false)) {
    double term = d.weight;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) term *= std::pow(rho[i][j], d.edges[i][j]);
    total += term;
  }
  return total;
}

void verify_diagram_weights() {
  auto fail = [](const std::string& what) {
    throw std::logic_error("diagram weight self-check failed: " + what);
  };
  const auto two = enumerate_diagrams(2, 2, false);
  if (two.size() != 1 || two[0].weight != 2.0) fail("m=2");
  const auto three = enumerate_diagrams(3, 2, false);
  if (three.size() != 1 || three[0].weight != 8.0) fail("m=3");
  int cycles = 0, pairings = 0;
  for (const Diagram& d : enumerate_diagrams(4, 2, false)) {
    if (d.connected && d.weight == 16.0) ++cycles;
    if (!d.connected && d.weight == 4.0) ++pairings;
  }
  if (cycles != 3 || pairings != 3) fail("m=4");
}

namespace {

void ensure_weights_verified() {
  static std::once_flag once;
  std::call_once(once, verify_diagram_weights);
}

void check_capacity(const VariationSpec& spec, const LatticeOptions& options) {
  if (spec.q > kMaxExactDegree) {
    throw CapacityError("exact cumulants support q <= " + std::to_string(kMaxExactDegree) +
                        "; use sampled cumulants");
  }
  if (spec.n > options.exact_n_cap) {
    throw CapacityError("n = " + std::to_string(spec.n) + " exceeds the exact-cumulant cap " +
                        std::to_string(options.exact_n_cap) + "; use sampled (Monte Carlo) cumulants");
  }
}

// Coefficients of the 4-node diagrams relative to (q!)^2, so that dividing the
// lattice sum by (n v_n / q!)^2 gives a moment of F_n.
detail::QuadCoefficients quad_coefficients(int q, bool connected_only) {
  detail::QuadCoefficients c;
  c.q = q;
  const double scale = factorial(q) * factorial(q);
  for (const Diagram& d : enumerate_diagrams(4, q, connected_only)) {
    c.coeff[d.edges[0][1]][d.edges[0][2]] = d.weight / scale;
  }
  return c;
}

// n v_n / q! = sum_{|k|<n} (n - |k|) rho(k)^q.
double pair_sum(const VariationSpec& spec) {
  return spec.v_n * static_cast<double>(spec.n) / factorial(spec.q);
}

}  // namespace

CumulantReport exact_cumulants(const VariationSpec& spec, const LatticeOptions& options) {
  check_capacity(spec, options);
  ensure_weights_verified();
  const CovarianceTable rho(spec.hurst, spec.n);
  const double s2 = pair_sum(spec);
  CompensatedSum<> pairs(static_cast<double>(spec.n));
  for (std::size_t g = 1; g < spec.n; ++g) {
    pairs += 2.0 * static_cast<double>(spec.n - g) * std::pow(rho(static_cast<long>(g)), spec.q);
  }
  const double kappa2 = enumerate_diagrams(2, spec.q, true).front().weight * pairs.value() /
                        (spec.v_n * static_cast<double>(spec.n));

  double kappa3 = 0.0;
  const auto triangles = enumerate_diagrams(3, spec.q, true);
  if (!triangles.empty()) {
    const double w = triangles.front().weight / std::pow(factorial(spec.q), 1.5);
    const double t = detail::triangle_lattice_sum(rho.lags(), spec.n, spec.q / 2, options.jobs);
    kappa3 = w * t / std::pow(s2, 1.5);
  }

  double kappa4 = 0.0;
  if (options.compute_kappa4) {
    const double quad =
        detail::quad_lattice_sum(rho.lags(), spec.n, quad_coefficients(spec.q, true), options.jobs);
    kappa4 = quad / (s2 * s2);
  }

  return CumulantReport{spec, kappa2, kappa3, kappa4, std::max(std::abs(kappa3), kappa4)};
}

double moment4_all_diagrams(const VariationSpec& spec, const LatticeOptions& options) {
  check_capacity(spec, options);
  ensure_weights_verified();
  const CovarianceTable rho(spec.hurst, spec.n);
  const double s2 = pair_sum(spec);
  const double quad =
      detail::quad_lattice_sum(rho.lags(), spec.n, quad_coefficients(spec.q, false), options.jobs);
  return quad / (s2 * s2);
}

}  // namespace fmtv
