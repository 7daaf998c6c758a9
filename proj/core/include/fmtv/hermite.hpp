#pragma once

#include <span>
#include <vector>

namespace fmtv {

// Probabilists' Hermite polynomials: H_0 = 1, H_{q+1}(x) = x H_q(x) - H_q'(x),
// so H_2 = x^2 - 1, H_3 = x^3 - 3x, H_4 = x^4 - 6x^2 + 3 and
// E[H_p(N) H_q(N)] = q! 1{p = q} for N ~ N(0, 1).
//
// NOT the physicists' family (H_2 = 4x^2 - 2). Mixing the two rescales every
// lattice sum by powers of sqrt(2).
//
// Evaluation uses H_{q+1}(x) = x H_q(x) - q H_{q-1}(x), which follows from
// H_q' = q H_{q-1}. The monomial expansion is never formed: its coefficients
// grow factorially and cancel badly for q >= 8.

/// H_q(x). Requires q >= 0.
double hermite(int q, double x);

/// H_q'(x) = q H_{q-1}(x).
double hermite_derivative(int q, double x);

/// Writes H_0(x), ..., H_q(x) into out[0..q]; out.size() must be >= q + 1.
void hermite_all(int q, double x, std::span<double> out);

/// Elementwise hermite(q, x); identical bits to the scalar loop.
std::vector<double> hermite_batch(int q, std::span<const double> xs);

}  // namespace fmtv
