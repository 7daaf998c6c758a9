#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace fmtv {

using TestFunction = std::function<double(double)>;

/// Uniform abscissae lo, lo + step, ..., hi.
struct SteinGrid {
  double lo = -8.0;
  double hi = 8.0;
  double step = 1.0 / 512.0;

  [[nodiscard]] std::vector<double> points() const;
};

/// Which closed form of the solution to evaluate.
///   split:      left-tail integral for x <= 0, right-tail integral for x > 0
///   left_tail:  f(x) =  e^{x^2/2} int_{-inf}^x h(y) e^{-y^2/2} dy everywhere
///   right_tail: f(x) = -e^{x^2/2} int_x^{inf} h(y) e^{-y^2/2} dy everywhere
/// with h = g - E[g(N)]. The one-sided forms lose accuracy as |x| grows on
/// the far side of zero and exist to cross-check split.
enum class SteinForm { split, left_tail, right_tail };

struct SteinOptions {
  SteinForm form = SteinForm::split;
  std::size_t hermite_nodes = 200;
};

/// f_g and f_g' = x f_g + h on a grid. All integrals are propagated cell by
/// cell as int h(y) e^{(x^2 - y^2)/2} dy, so e^{x^2/2} is never formed.
struct SteinSolution {
  std::vector<double> grid;
  std::vector<double> values;      // f_g
  std::vector<double> derivative;  // f_g'
  std::vector<double> centered;    // h = g - E[g(N)]
  double g_mean = 0.0;             // E[g(N)]
  double g_norm = 0.0;             // max |h| over the grid
};

/// Requires the grid to cover [-8, 8]; throws DomainError if g is not finite
/// or exceeds 1e12 in magnitude on the grid.
SteinSolution stein_solve(const TestFunction& g, const SteinGrid& grid = {},
                          const SteinOptions& options = {});

/// max |f'_g - x f_g - h| over interior points, with f'_g taken by a
/// fourth-order central difference of the values.
double ode_residual(const SteinSolution& solution);

/// Sup-norm ratios ||f_g|| / ||h|| and ||f_g'|| / ||h||; both 0 when h vanishes
/// to rounding (constant g).
struct SteinRatios {
  double ratio_f = 0.0;
  double ratio_fprime = 0.0;
};
SteinRatios stein_bound_check(const SteinSolution& solution);

/// Constants of the Stein solution for g = sin.
struct FsinConstants {
  double m2;         // E[f''(N)] = -(1/3) E[sin(N) H_3(N)]  (Gauss-Hermite)
  double m3;         // E[f'''(N)] = -(1/4) E[sin(N) H_4(N)]
  double m2_direct;  // E[f''(N)] integrated from the grid solution
  double m3_direct;
  double sup2;       // sup |f''| on [-8, 8], from f'' = f + x f' + cos
  double sup3;       // sup |f'''|, from f''' = 2 f' + x f'' - sin
  double sup2_fd;    // finite-difference cross-checks (step ~1e-3, Richardson)
  double sup3_fd;
};
FsinConstants fsin_constants();

struct NamedFunction {
  std::string name;
  TestFunction g;
};

/// sin, cos, tanh and smoothed indicators.
std::vector<NamedFunction> stein_dictionary();

}  // namespace fmtv
