#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "fmtv/covariance.hpp"

namespace fmtv {

/// One Wick-contraction pattern of m Hermite nodes of common degree q: node i
/// is joined to node j by edges[i][j] lines. Row sums equal q.
///
/// weight = prod_i q! / prod_{j != i} edges[i][j]!  *  prod_{i<j} edges[i][j]!
/// counts the perfect matchings of the m*q half-edges realizing the pattern, so
///   E[prod_i H_q(X_i)] = sum_diagrams weight * prod_{i<j} rho_ij^{edges[i][j]}.
struct Diagram {
  int m = 0;
  std::array<std::array<int, 4>, 4> edges{};
  double weight = 0.0;  // exact integer for q <= 8
  bool connected = false;
};

/// All diagrams on m in {2, 3, 4} nodes, in lexicographic order of the upper
/// triangle. Throws DomainError for other m or q < 1.
std::vector<Diagram> enumerate_diagrams(int m, int q, bool connected_only);

using CorrelationMatrix = std::vector<std::vector<double>>;

/// E[H_q(X_1) ... H_q(X_m)] for jointly standard Gaussians with correlation
/// matrix rho (m x m, unit diagonal, symmetric, entries in [-1, 1]).
double joint_hermite_moment(int q, const CorrelationMatrix& rho);

/// Exact cumulants of F_n from lattice sums over the diagram expansion.
struct CumulantReport {
  VariationSpec spec;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
  double kappa4 = 0.0;
  double m_stat = 0.0;  // max(|kappa3|, kappa4)
};

struct LatticeOptions {
  /// Largest n accepted by the exact O(n^3) fourth-cumulant sum.
  std::size_t exact_n_cap = 8192;
  unsigned jobs = 1;
  /// false skips the O(n^3) sum; kappa4 is then reported as 0.
  bool compute_kappa4 = true;
};

inline constexpr int kMaxExactDegree = 10;

/// kappa2 from the pair sum, kappa3 from the connected triangle sum (O(n^2)
/// over sorted gaps), kappa4 from the connected 4-node diagrams (O(n^3/6)
/// over sorted gaps). Throws CapacityError when n > exact_n_cap or
/// q > kMaxExactDegree.
CumulantReport exact_cumulants(const VariationSpec& spec, const LatticeOptions& options = {});

/// E[F_n^4] from all 4-node diagrams, connected and disconnected.
double moment4_all_diagrams(const VariationSpec& spec, const LatticeOptions& options = {});

/// Checks the weight formula against the hand-counted q = 2 cases. Throws
/// std::logic_error on mismatch; called once before the first lattice sum.
void verify_diagram_weights();

}  // namespace fmtv
