#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "fmtv/diagrams.hpp"
#include "fmtv/sampler.hpp"

namespace fmtv {

enum class TvMethod { kde, histogram };

std::string to_string(TvMethod method);
TvMethod parse_tv_method(const std::string& text);

struct Estimate {
  double value = 0.0;
  double uncertainty = 0.0;
};

/// Fewest samples the distance estimators accept.
inline constexpr std::size_t kMinDistanceSamples = 10000;

struct TvOptions {
  std::size_t grid_points = 4096;
  /// Re-run on a doubled grid and require |difference| < 1e-4.
  bool check_grid = true;
  std::size_t sub_batches = 10;
};

/// d_TV(sample law, N(0,1)) = (1/2) int |f_hat - phi|.
///
/// kde: Gaussian kernel with Silverman bandwidth h = 1.06 sd n^{-1/5},
/// linearly binned onto a uniform grid over [min - 3h, max + 3h] and
/// integrated by the trapezoid rule; the normal mass outside the grid is
/// added in closed form. histogram: Freedman-Diaconis bins compared with
/// exact normal bin probabilities.
///
/// The uncertainty is the standard error of the estimates on sub_batches
/// contiguous slices. It does not include estimator bias; see bias_allowance.
Estimate tv_estimate(std::span<const double> samples, TvMethod method, const TvOptions& options = {});

/// sup |ECDF - Phi|, with the 95% Dvoretzky-Kiefer-Wolfowitz half-width as uncertainty.
Estimate kolmogorov_distance(std::span<const double> samples);

struct TrigGaps {
  double sin_gap;  // mean sin(F) - E[sin N], E[sin N] = 0
  double sin_se;
  double cos_gap;  // mean cos(F) - E[cos N], E[cos N] = e^{-1/2}
  double cos_se;
};
TrigGaps trig_gaps(std::span<const double> samples);

/// (1/2) max(|sin_gap|, |cos_gap|): test functions bounded by 1 give this as
/// a lower bound on d_TV. Computed from estimated gaps, so it is itself an estimate.
double tv_lower_bound_trig(const TrigGaps& gaps);

struct FmtBounds {
  double upper;         // sqrt((4q-4)/(3q)) sqrt(kappa4)
  double upper_simple;  // (2/sqrt(3)) sqrt(kappa4)
};
FmtBounds fmt_upper_bound(int q, double kappa4);

/// Bias allowance carried by TV estimates: 0.01 at 10^6 samples, scaled by
/// the n^{-2/5} rate of the KDE noise floor for other sample sizes.
double bias_allowance(std::size_t count);

/// TV estimate of a N(0, 1) sample of the given size against N(0, 1).
struct NullCalibration {
  std::size_t count;
  double estimate;
  double allowance;
  bool passed;  // estimate <= allowance
};
NullCalibration calibrate_null(std::size_t count, std::uint64_t seed, TvMethod method);

struct DistanceReport {
  VariationSpec spec;
  TvMethod method;
  std::size_t count;
  Estimate tv_density;
  Estimate kolmogorov;
  double sin_gap, sin_se;
  double cos_gap, cos_se;
  double tv_lower_trig;
  double fmt_upper;
  double fmt_upper_simple;
  double bias_allowance;
  double sandwich_ratio;  // tv_density / m_stat; descriptive only
};

DistanceReport make_distance_report(const SampleBatch& batch, const CumulantReport& cumulants,
                                    TvMethod method, const TvOptions& options = {});

}  // namespace fmtv
