#include "fmtv/stein.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "fmtv/compensated_sum.hpp"
#include "fmtv/errors.hpp"
#include "fmtv/hermite.hpp"
#include "fmtv/normal.hpp"

namespace fmtv {

std::vector<double> SteinGrid::points() const {
  if (!(step > 0.0) || !(hi > lo)) throw DomainError("invalid Stein grid");
  const auto cells = static_cast<std::size_t>(std::llround((hi - lo) / step));
  std::vector<double> x(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) x[i] = lo + static_cast<double>(i) * step;
  x.back() = hi;
  return x;
}

namespace {

using Legendre = boost::math::quadrature::gauss<double, 10>;

// int_a^b h(y) exp((c^2 - y^2)/2) dy by 10-point Gauss-Legendre.
template <typename H>
double cell_integral(const H& h, double a, double b, double c) {
  const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
  const auto& xs = Legendre::abscissa();
  const auto& ws = Legendre::weights();
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double offsets[2] = {xs[i], -xs[i]};
    const int copies = xs[i] == 0.0 ? 1 : 2;
    for (int s = 0; s < copies; ++s) {
      const double y = mid + rad * offsets[s];
      total += ws[i] * h(y) * std::exp(0.5 * (c - y) * (c + y));
    }
  }
  return rad * total;
}

// int_{-inf}^{a} h e^{(a^2 - y^2)/2} dy (sign = -1, a < 0) or
// int_a^{inf} h e^{(a^2 - y^2)/2} dy (sign = +1, a > 0). The weight decays
// like e^{-|a| t - t^2/2} in the distance t from a; [0, 8] is ample.
template <typename H>
double tail_integral(const H& h, double a, double direction) {
  double total = 0.0;
  const double width = 0.125;
  for (int k = 0; k < 64; ++k) {
    const double t0 = a + direction * width * k;
    const double t1 = a + direction * width * (k + 1);
    total += cell_integral(h, std::min(t0, t1), std::max(t0, t1), a);
  }
  return total;
}

}  // namespace

SteinSolution stein_solve(const TestFunction& g, const SteinGrid& grid, const SteinOptions& options) {
  if (grid.lo > -8.0 || grid.hi < 8.0) throw DomainError("Stein grid must cover [-8, 8]");
  SteinSolution sol;
  sol.grid = grid.points();
  const std::size_t len = sol.grid.size();
  for (double x : sol.grid) {
    const double v = g(x);
    if (!std::isfinite(v) || std::abs(v) > 1e12) throw DomainError("test function is not bounded on the grid");
  }
  sol.g_mean = gauss_hermite(options.hermite_nodes).expectation(g);
  const double mean = sol.g_mean;
  auto h = [&](double y) { return g(y) - mean; };

  sol.centered.resize(len);
  for (std::size_t i = 0; i < len; ++i) sol.centered[i] = h(sol.grid[i]);

  std::vector<double> left(len), right(len);
  const auto& x = sol.grid;
  const bool want_left = options.form != SteinForm::right_tail;
  const bool want_right = options.form != SteinForm::left_tail;
  if (want_left) {
    left[0] = tail_integral(h, x[0], -1.0);
    for (std::size_t i = 0; i + 1 < len; ++i) {
      const double carry = std::exp(0.5 * (x[i + 1] - x[i]) * (x[i + 1] + x[i]));
      left[i + 1] = carry * left[i] + cell_integral(h, x[i], x[i + 1], x[i + 1]);
    }
  }
  if (want_right) {
    right[len - 1] = -tail_integral(h, x[len - 1], 1.0);
    for (std::size_t i = len - 1; i-- > 0;) {
      const double carry = std::exp(0.5 * (x[i] - x[i + 1]) * (x[i] + x[i + 1]));
      right[i] = carry * right[i + 1] - cell_integral(h, x[i], x[i + 1], x[i]);
    }
  }
  sol.values.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    switch (options.form) {
      case SteinForm::split: sol.values[i] = x[i] <= 0.0 ? left[i] : right[i]; break;
      case SteinForm::left_tail: sol.values[i] = left[i]; break;
      case SteinForm::right_tail: sol.values[i] = right[i]; break;
    }
  }
  sol.derivative.resize(len);
  for (std::size_t i = 0; i < len; ++i) sol.derivative[i] = x[i] * sol.values[i] + sol.centered[i];
  for (double c : sol.centered) sol.g_norm = std::max(sol.g_norm, std::abs(c));
  return sol;
}

double ode_residual(const SteinSolution& s) {
  const std::size_t len = s.grid.size();
  if (len < 5) return 0.0;
  const double step = s.grid[1] - s.grid[0];
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < len; ++i) {
    const double fd = (s.values[i - 2] - 8.0 * s.values[i - 1] + 8.0 * s.values[i + 1] - s.values[i + 2]) /
                      (12.0 * step);
    worst = std::max(worst, std::abs(fd - s.grid[i] * s.values[i] - s.centered[i]));
  }
  return worst;
}

SteinRatios stein_bound_check(const SteinSolution& s) {
  // A constant g leaves h at rounding level of E[g(N)]; treat it as zero.
  if (s.g_norm <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s.g_mean))) return {};
  double f = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    f = std::max(f, std::abs(s.values[i]));
    fp = std::max(fp, std::abs(s.derivative[i]));
  }
  return SteinRatios{f / s.g_norm, fp / s.g_norm};
}

namespace {

// E[u(N)] for a function tabulated on the grid; the grid covers [-8, 8] so
// the neglected mass is below 1e-15.
double grid_expectation(const std::vector<double>& x, const std::vector<double>& u) {
  // Simpson on an even number of cells.
  const std::size_t cells = x.size() - 1;
  const double step = x[1] - x[0];
  CompensatedSum<> acc;
  for (std::size_t i = 0; i + 2 <= cells; i += 2) {
    acc += step / 3.0 *
           (u[i] * normal_pdf(x[i]) + 4.0 * u[i + 1] * normal_pdf(x[i + 1]) + u[i + 2] * normal_pdf(x[i + 2]));
  }
  return acc.value();
}

struct SinDerivatives {
  std::vector<double> second, third;
};

SinDerivatives sin_derivatives(const SteinSolution& s) {
  SinDerivatives d;
  const std::size_t len = s.grid.size();
  d.second.resize(len);
  d.third.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    const double x = s.grid[i];
    d.second[i] = s.values[i] + x * s.derivative[i] + std::cos(x);
    d.third[i] = 2.0 * s.derivative[i] + x * d.second[i] - std::sin(x);
  }
  return d;
}

double sup_abs(const std::vector<double>& v, std::size_t margin = 0) {
  double m = 0.0;
  for (std::size_t i = margin; i + margin < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

// Richardson-extrapolated central second difference at steps k and 2k cells.
std::vector<double> second_difference(const std::vector<double>& f, double step) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 2; i + 2 < f.size(); ++i) {
    const double d1 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (step * step);
    const double d2 = (f[i + 2] - 2.0 * f[i] + f[i - 2]) / (4.0 * step * step);
    out[i] = (4.0 * d1 - d2) / 3.0;
  }
  return out;
}

}  // namespace

FsinConstants fsin_constants() {
  const auto& rule = gauss_hermite(200);
  FsinConstants c{};
  c.m2 = -rule.expectation([](double x) { return std::sin(x) * hermite(3, x); }) / 3.0;
  c.m3 = -rule.expectation([](double x) { return std::sin(x) * hermite(4, x); }) / 4.0;

  const SteinSolution sol = stein_solve([](double x) { return std::sin(x); });
  const SinDerivatives d = sin_derivatives(sol);
  c.m2_direct = grid_expectation(sol.grid, d.second);
  c.m3_direct = grid_expectation(sol.grid, d.third);
  c.sup2 = sup_abs(d.second);
  c.sup3 = sup_abs(d.third);

  SteinGrid fine;
  fine.step = 1.0 / 1024.0;
  const SteinSolution fs = stein_solve([](double x) { return std::sin(x); }, fine);
  const auto f2 = second_difference(fs.values, fine.step);
  const auto f3 = second_difference(fs.derivative, fine.step);
  c.sup2_fd = sup_abs(f2, 2);
  c.sup3_fd = sup_abs(f3, 2);
  return c;
}

std::vector<NamedFunction> stein_dictionary() {
  auto logistic = [](double centre, double width) {
    return [=](double x) { return 1.0 / (1.0 + std::exp(-(x - centre) / width)); };
  };
  auto bump = [](double a, double b, double width) {
    return [=](double x) {
      return 1.0 / (1.0 + std::exp(-(x - a) / width)) - 1.0 / (1.0 + std::exp(-(x - b) / width));
    };
  };
  return {
      {"sin", [](double x) { return std::sin(x); }},
      {"cos", [](double x) { return std::cos(x); }},
      {"tanh", [](double x) { return std::tanh(x); }},
      {"sin(2x)", [](double x) { return std::sin(2.0 * x); }},
      {"smooth_step(0,0.5)", logistic(0.0, 0.5)},
      {"smooth_step(1,0.5)", logistic(1.0, 0.5)},
      {"smooth_interval(-1,0.5,0.4)", bump(-1.0, 0.5, 0.4)},
  };
}

}  // namespace fmtv
