#pragma once

// Private lattice-sum kernels shared by the cumulant routines.

#include <array>
#include <cstddef>
#include <span>

namespace fmtv::detail {

/// Coefficients of P(A, B, C) = sum_{x+y+z=q} coeff[x][y] A^x B^y C^z, where
/// for positions a <= b <= c <= d
///   A = rho_ab rho_cd,  B = rho_ac rho_bd,  C = rho_ad rho_bc.
struct QuadCoefficients {
  int q = 0;
  std::array<std::array<double, 11>, 11> coeff{};
};

/// sum over (a, b, c) in [0, n)^3 of (rho_ab rho_bc rho_ac)^e.
double triangle_lattice_sum(std::span<const double> rho, std::size_t n, int e, unsigned jobs);

/// sum over (a, b, c, d) in [0, n)^4 of P(A, B, C). P must be symmetric under
/// permutations of (A, B, C), as it is for any node-permutation-closed diagram set.
double quad_lattice_sum(std::span<const double> rho, std::size_t n, const QuadCoefficients& coeffs,
                        unsigned jobs);

}  // namespace fmtv::detail
