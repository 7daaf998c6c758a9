#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fmtv/diagrams.hpp"
#include "fmtv/distances.hpp"

namespace fmtv {

enum class Statistic { kappa3, kappa4, tv };

std::string to_string(Statistic s);

/// Asymptotic order n^exponent (log n)^log_power.
struct RateOrder {
  double exponent = 0.0;
  int log_power = 0;
  std::string regime;
  bool vanishes = false;  // kappa3 of odd q is identically zero
};

/// Orders compared by exponent, then log power. Exponents within 1e-12 tie.
int compare_orders(const RateOrder& a, const RateOrder& b);

/// Tabulated rate of kappa3(F_n), kappa4(F_n) or d_TV(F_n, N) for H in the
/// open CLT regime (0, 1 - 1/(2q)). Throws RegimeError outside it and
/// NotTabulatedError for tv with q not in {2, 3}.
RateOrder theoretical_exponent(int q, double hurst, Statistic statistic);

/// Distance from H to the nearest regime boundary of the table for
/// (q, statistic), or to the CLT threshold.
double distance_to_regime_boundary(int q, double hurst, Statistic statistic);

struct FitPoint {
  double n;
  double value;
};

struct FitOptions {
  /// Refit on the top half of the grid when local slopes drift monotonically.
  bool trim_drift = true;
};

struct ExponentFit {
  double exponent = 0.0;
  double stderr_ = 0.0;
  std::size_t points_used = 0;
  bool drift_trimmed = false;
  bool geometric = true;  // n-grid has a constant ratio (within 1e-6)
};

/// Least-squares slope of log(value / log(n)^log_power) against log n.
/// Requires >= 5 points with value > 0 (DomainError otherwise; a kappa3 family
/// of odd q must be skipped by the caller).
ExponentFit fit_exponent(std::span<const FitPoint> points, int log_power, const FitOptions& options = {});

struct RateFit {
  Statistic statistic;
  int q;
  double hurst;
  std::vector<double> n_grid;
  ExponentFit fit;
  double theoretical_exponent = 0.0;
  int log_power = 0;
  std::string regime_label;
  double tolerance = 0.0;    // 0.05, or 0.15 near regime boundaries / with log factors
  bool within_tolerance = false;
  std::string status;        // "ok", "out-of-regime", "not-tabulated", "skipped: ..."
};

struct SandwichRecord {
  int q;
  double hurst;
  std::size_t n;
  double m_stat;
  double tv_estimate;
  double tv_uncertainty;
  double ratio;
};

struct GridConfig {
  std::vector<int> qs;
  std::vector<double> hursts;
  std::vector<std::size_t> n_grid;
  std::size_t replicates = 100000;
  std::uint64_t seed = 0;
  std::size_t exact_n_cap = 8192;
  TvMethod tv_method = TvMethod::kde;
  unsigned jobs = 1;
  bool compute_distances = true;
};

/// Replicates for one spec: max(configured, min(ceil(16 / M^2), 10^6)), which
/// targets a TV standard error below M/4.
std::size_t replicates_for(double m_stat, std::size_t configured);

/// Per-spec seed derived from the root seed and (q, H, n) only, so a spec
/// draws the same samples whatever else is on the grid.
std::uint64_t spec_seed(std::uint64_t seed, int q, double hurst, std::size_t n);

struct SpecResult {
  std::size_t job_id = 0;
  VariationSpec spec;
  CumulantReport cumulants;
  std::string cumulant_source;  // "exact" or "sampled"
  double kappa3_se = 0.0, kappa4_se = 0.0;
  std::optional<DistanceReport> distance;
  std::vector<std::string> flags;
  std::string error;  // non-empty when the spec failed
};

struct GridSummary {
  int q;
  double hurst;
  bool ratio_stable = false;     // every ratio within [min/2, 2 max] of the central half
  double ratio_min = 0.0, ratio_max = 0.0;
  double max_exponent_discrepancy = 0.0;
};

struct GridResult {
  std::vector<SpecResult> specs;  // job order: q, then H, then n
  std::vector<RateFit> fits;
  std::vector<SandwichRecord> sandwich;
  std::vector<GridSummary> summaries;
  std::vector<std::string> failures;
};

using JobCallback = std::function<void(const SpecResult&)>;

/// Exact (or, above the cap, sampled) cumulants and distance reports for every
/// spec, exponent fits per (q, H, statistic), and sandwich ratios.
/// Per-spec failures are recorded and do not abort the grid. on_job, when set,
/// is called once per finished spec (serialized).
GridResult run_grid(const GridConfig& config, const JobCallback& on_job = {});

}  // namespace fmtv
