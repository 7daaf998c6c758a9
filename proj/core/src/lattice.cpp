#include "lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fmtv/compensated_sum.hpp"
#include "fmtv/errors.hpp"
#include "fmtv/parallel.hpp"

// Both sums enumerate sorted positions p0 <= p1 <= ... by their gaps and a
// translation count. The summand is symmetric in the node labels, so each
// sorted configuration stands for m!/prod(tie sizes)! labelled tuples.

namespace fmtv::detail {

namespace {

// Fixed-order 8-lane sum of a buffer. Lanes are independent, so the compiler
// may vectorize without reassociating and the result is reproducible.
double blocked_sum(const double* x, std::size_t len) {
  double lanes[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    for (int j = 0; j < 8; ++j) lanes[j] += x[i + j];
  }
  double tail = 0.0;
  for (; i < len; ++i) tail += x[i];
  return ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3])) +
         ((lanes[4] + lanes[5]) + (lanes[6] + lanes[7])) + tail;
}

// Labelled tuples per sorted configuration, indexed by which gaps are zero.
constexpr double quad_multiplicity(bool z1, bool z2, bool z3) {
  const int zeros = int(z1) + int(z2) + int(z3);
  if (zeros == 0) return 24.0;
  if (zeros == 1) return 12.0;
  if (zeros == 3) return 1.0;
  return (z1 && z3) ? 6.0 : 4.0;  // {2,2} split or a triple tie
}

template <int Q>
struct Flat {
  static constexpr int kSize = (Q + 1) * (Q + 2) / 2;
  double c[kSize];

  explicit Flat(const QuadCoefficients& in) {
    int k = 0;
    for (int x = 0; x <= Q; ++x)
      for (int y = 0; y <= Q - x; ++y) c[k++] = in.coeff[x][y];
  }
};

template <int Q>
inline double eval_poly(const Flat<Q>& f, double a, double b, double c) {
  double ap[Q + 1], bp[Q + 1], cp[Q + 1];
  ap[0] = bp[0] = cp[0] = 1.0;
  for (int k = 1; k <= Q; ++k) {
    ap[k] = ap[k - 1] * a;
    bp[k] = bp[k - 1] * b;
    cp[k] = cp[k - 1] * c;
  }
  double total = 0.0;
  int k = 0;
  for (int x = 0; x <= Q; ++x) {
    double inner = 0.0;
    for (int y = 0; y <= Q - x; ++y) inner += f.c[k++] * bp[y] * cp[Q - x - y];
    total += ap[x] * inner;
  }
  return total;
}

// P is symmetric in (A, B, C), so it is a polynomial in the elementary
// symmetric functions s1 = A+B+C, s2 = AB+BC+CA, s3 = ABC:
//   P = sum_{i + 2j + 3k = Q} d_ijk s1^i s2^j s3^k,
// which has at most 14 terms for Q <= 10 against 66 monomials. The diagram
// coefficients are integers, and so are the d_ijk; the reduction below is
// exact in double arithmetic for these magnitudes.
template <int Q>
struct Elementary {
  // d[j][k] multiplies s1^(Q-2j-3k) s2^j s3^k.
  double d[Q / 2 + 1][Q / 3 + 1] = {};

  explicit Elementary(const QuadCoefficients& in) {
    // poly[x][y][z], x + y + z = Q; every power of s1, s2, s3 is expanded on demand.
    using Cube = std::array<std::array<std::array<double, Q + 1>, Q + 1>, Q + 1>;
    Cube poly{};
    for (int x = 0; x <= Q; ++x)
      for (int y = 0; y <= Q - x; ++y) poly[x][y][Q - x - y] = in.coeff[x][y];

    // Generic product of a homogeneous polynomial with s1, s2 or s3.
    auto times = [](const Cube& p, int which) {
      Cube r{};
      for (int x = 0; x <= Q; ++x)
        for (int y = 0; x + y <= Q; ++y)
          for (int z = 0; x + y + z <= Q; ++z) {
            const double v = p[x][y][z];
            if (v == 0.0) continue;
            auto add = [&](int dx, int dy, int dz) {
              if (x + dx + y + dy + z + dz <= Q) r[x + dx][y + dy][z + dz] += v;
            };
            if (which == 1) { add(1, 0, 0); add(0, 1, 0); add(0, 0, 1); }
            if (which == 2) { add(1, 1, 0); add(0, 1, 1); add(1, 0, 1); }
            if (which == 3) add(1, 1, 1);
          }
      return r;
    };

    // Peel off the lexicographically leading monomial A^x B^y C^z (x >= y >= z)
    // with s1^(x-y) s2^(y-z) s3^z until nothing is left.
    for (int guard = 0; guard < 64; ++guard) {
      int lx = -1, ly = -1, lz = -1;
      for (int x = Q; x >= 0 && lx < 0; --x)
        for (int y = std::min(x, Q - x); y >= 0 && lx < 0; --y) {
          const int z = Q - x - y;
          if (z > y) continue;
          if (poly[x][y][z] != 0.0) { lx = x; ly = y; lz = z; }
        }
      if (lx < 0) {
        // Whatever is left sits on unsorted monomials only: P was not symmetric.
        for (int x = 0; x <= Q; ++x)
          for (int y = 0; x + y <= Q; ++y)
            if (std::abs(poly[x][y][Q - x - y]) > 1e-9) {
              throw std::logic_error("quad coefficients are not symmetric in (A, B, C)");
            }
        return;
      }
      const double lead = poly[lx][ly][lz];
      Cube term{};
      term[0][0][0] = lead;
      for (int t = 0; t < lx - ly; ++t) term = times(term, 1);
      for (int t = 0; t < ly - lz; ++t) term = times(term, 2);
      for (int t = 0; t < lz; ++t) term = times(term, 3);
      for (int x = 0; x <= Q; ++x)
        for (int y = 0; x + y <= Q; ++y) poly[x][y][Q - x - y] -= term[x][y][Q - x - y];
      d[ly - lz][lz] = lead;
    }
    throw std::logic_error("quad coefficients are not symmetric in (A, B, C)");
  }
};

constexpr std::size_t kLanes = 32;

// Terms g3 = first .. first+len-1 of the (g1, g2) row, written to out.
// Evaluated in blocks of kLanes with lane-innermost loops so every step maps
// onto vector registers. rho must be readable (zero padded) kLanes entries
// past n, and out must hold len + kLanes values.
template <int Q>
void quad_row(const Elementary<Q>& e, const double* rho, std::size_t g1, std::size_t g2, std::size_t first,
              std::size_t len, double count0, double* out) {
  const double a1 = rho[g1];
  const double b1 = rho[g1 + g2];
  const double c2 = rho[g2];
  const double* r3 = rho + first;
  const double* r23 = rho + g2 + first;
  const double* r123 = rho + g1 + g2 + first;
  for (std::size_t i0 = 0; i0 < len; i0 += kLanes) {
    double p1[Q + 1][kLanes], p2[Q / 2 + 1][kLanes], p3[Q / 3 + 1][kLanes], total[kLanes];
    for (std::size_t l = 0; l < kLanes; ++l) {
      const std::size_t i = i0 + l;
      const double a = a1 * r3[i];
      const double b = b1 * r23[i];
      const double c = c2 * r123[i];
      p1[0][l] = p2[0][l] = p3[0][l] = 1.0;
      p1[1 % (Q + 1)][l] = a + b + c;
      if constexpr (Q >= 2) p2[1][l] = a * b + (a + b) * c;
      if constexpr (Q >= 3) p3[1][l] = a * b * c;
      total[l] = 0.0;
    }
    for (int t = 2; t <= Q; ++t)
      for (std::size_t l = 0; l < kLanes; ++l) p1[t][l] = p1[t - 1][l] * p1[1][l];
    if constexpr (Q >= 4) {
      for (int t = 2; t <= Q / 2; ++t)
        for (std::size_t l = 0; l < kLanes; ++l) p2[t][l] = p2[t - 1][l] * p2[1][l];
    }
    if constexpr (Q >= 6) {
      for (int t = 2; t <= Q / 3; ++t)
        for (std::size_t l = 0; l < kLanes; ++l) p3[t][l] = p3[t - 1][l] * p3[1][l];
    }
    for (int j = 0; j <= Q / 2; ++j)
      for (int k = 0; 2 * j + 3 * k <= Q; ++k) {
        const double d = e.d[j][k];
        const int i = Q - 2 * j - 3 * k;
        for (std::size_t l = 0; l < kLanes; ++l) total[l] += d * p1[i][l] * p2[j][l] * p3[k][l];
      }
    for (std::size_t l = 0; l < kLanes; ++l) {
      out[i0 + l] = (count0 - static_cast<double>(i0 + l)) * total[l];
    }
  }
}

template <int Q>
double quad_sum_impl(std::span<const double> rho_span, std::size_t n, const QuadCoefficients& coeffs,
                     unsigned jobs) {
  const Flat<Q> flat(coeffs);
  const Elementary<Q> elementary(coeffs);
  std::vector<double> padded(n + kLanes, 0.0);
  std::copy_n(rho_span.begin(), n, padded.begin());
  const double* rho = padded.data();
  std::vector<double> per_g1(n, 0.0);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(jobs, n));
  std::vector<std::vector<double>> buffers(workers, std::vector<double>(n + kLanes));

  parallel_for_dynamic(n, static_cast<unsigned>(workers), [&](std::size_t g1, unsigned w) {
    double* buf = buffers[w].data();
    CompensatedSum<> row_acc;
    for (std::size_t g2 = 0; g1 + g2 < n; ++g2) {
      const std::size_t span = n - g1 - g2;  // g3 in [0, span)
      const bool z1 = g1 == 0, z2 = g2 == 0;
      double row = 0.0;
      {
        const double p = eval_poly<Q>(flat, rho[g1] * rho[0], rho[g1 + g2] * rho[g2], rho[g1 + g2] * rho[g2]);
        row += quad_multiplicity(z1, z2, true) * static_cast<double>(span) * p;
      }
      if (span > 1) {
        quad_row<Q>(elementary, rho, g1, g2, 1, span - 1, static_cast<double>(span - 1), buf);
        row += quad_multiplicity(z1, z2, false) * blocked_sum(buf, span - 1);
      }
      row_acc += row;
    }
    per_g1[g1] = row_acc.value();
  });

  CompensatedSum<> total;
  for (double v : per_g1) total += v;
  return total.value();
}

template <int... Qs>
double dispatch_quad(int q, std::span<const double> rho, std::size_t n, const QuadCoefficients& c,
                     unsigned jobs, std::integer_sequence<int, Qs...>) {
  double result = 0.0;
  bool found = ((q == Qs ? (result = quad_sum_impl<Qs>(rho, n, c, jobs), true) : false) || ...);
  if (!found) throw CapacityError("quad lattice kernel supports 1 <= q <= 10");
  return result;
}

}  // namespace

double triangle_lattice_sum(std::span<const double> rho, std::size_t n, int e, unsigned jobs) {
  if (rho.size() < n) throw DomainError("covariance table shorter than n");
  std::vector<double> per_g1(n, 0.0);
  parallel_for_dynamic(n, jobs, [&](std::size_t g1, unsigned) {
    CompensatedSum<> acc;
    for (std::size_t g2 = 0; g1 + g2 < n; ++g2) {
      const int zeros = int(g1 == 0) + int(g2 == 0);
      const double mult = zeros == 0 ? 6.0 : (zeros == 1 ? 3.0 : 1.0);
      const double base = rho[g1] * rho[g2] * rho[g1 + g2];
      acc += mult * static_cast<double>(n - g1 - g2) * std::pow(base, e);
    }
    per_g1[g1] = acc.value();
  });
  CompensatedSum<> total;
  for (double v : per_g1) total += v;
  return total.value();
}

double quad_lattice_sum(std::span<const double> rho, std::size_t n, const QuadCoefficients& coeffs,
                        unsigned jobs) {
  if (rho.size() < n) throw DomainError("covariance table shorter than n");
  return dispatch_quad(coeffs.q, rho, n, coeffs, jobs,
                       std::integer_sequence<int, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10>{});
}

}  // namespace fmtv::detail
