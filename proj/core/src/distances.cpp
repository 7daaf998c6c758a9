#include "fmtv/distances.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fmtv/compensated_sum.hpp"
#include "fmtv/errors.hpp"
#include "fmtv/normal.hpp"

namespace fmtv {

std::string to_string(TvMethod method) { return method == TvMethod::kde ? "kde" : "histogram"; }

TvMethod parse_tv_method(const std::string& text) {
  if (text == "kde") return TvMethod::kde;
  if (text == "histogram") return TvMethod::histogram;
  throw DomainError("unknown tv method '" + text + "' (expected kde or histogram)");
}

namespace {

void require_samples(std::span<const double> samples) {
  if (samples.size() < kMinDistanceSamples) {
    throw CapacityError("distance estimates need at least 10^4 samples, got " +
                        std::to_string(samples.size()));
  }
}

double sample_sd(std::span<const double> x) {
  CompensatedSum<> s;
  for (double v : x) s += v;
  const double mean = s.value() / static_cast<double>(x.size());
  CompensatedSum<> ss;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss.value() / static_cast<double>(x.size() - 1));
}

double kde_tv(std::span<const double> x, std::size_t grid_points) {
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  const double count = static_cast<double>(x.size());
  const double h = 1.06 * sample_sd(x) * std::pow(count, -0.2);
  const double lo = *mn - 3.0 * h;
  const double hi = *mx + 3.0 * h;
  const std::size_t g = grid_points;
  const double delta = (hi - lo) / static_cast<double>(g - 1);

  std::vector<double> bins(g, 0.0);
  for (double v : x) {
    const double t = (v - lo) / delta;
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), g - 2);
    const double frac = t - static_cast<double>(i);
    bins[i] += 1.0 - frac;
    bins[i + 1] += frac;
  }

  const auto half = static_cast<std::size_t>(std::ceil(7.0 * h / delta));
  std::vector<double> kernel(half + 1);
  for (std::size_t l = 0; l <= half; ++l) {
    const double u = static_cast<double>(l) * delta / h;
    kernel[l] = normal_pdf(u) / (h * count);
  }

  std::vector<double> diff(g);
  for (std::size_t j = 0; j < g; ++j) {
    const std::size_t a = j > half ? j - half : 0;
    const std::size_t b = std::min(g - 1, j + half);
    double f = 0.0;
    for (std::size_t i = a; i <= b; ++i) f += bins[i] * kernel[i > j ? i - j : j - i];
    diff[j] = std::abs(f - normal_pdf(lo + static_cast<double>(j) * delta));
  }
  CompensatedSum<> integral;
  for (std::size_t j = 0; j + 1 < g; ++j) integral += 0.5 * (diff[j] + diff[j + 1]) * delta;
  const double outside = normal_cdf(lo) + normal_cdf(-hi);
  return 0.5 * (integral.value() + outside);
}

double histogram_tv(std::span<const double> x) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double count = static_cast<double>(sorted.size());
  auto quantile = [&](double p) {
    const double pos = p * (count - 1.0);
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return i + 1 < sorted.size() ? sorted[i] * (1.0 - frac) + sorted[i + 1] * frac : sorted[i];
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double lo = sorted.front();
  const double hi = sorted.back();
  double width = 2.0 * iqr * std::pow(count, -1.0 / 3.0);
  if (!(width > 0.0)) width = (hi - lo) / 100.0;
  const auto bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / width)));
  width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> counts(bins, 0.0);
  for (double v : sorted) {
    const auto b = std::min<std::size_t>(static_cast<std::size_t>((v - lo) / width), bins - 1);
    counts[b] += 1.0;
  }
  CompensatedSum<> total(normal_cdf(lo) + normal_cdf(-hi));
  for (std::size_t b = 0; b < bins; ++b) {
    const double e0 = lo + static_cast<double>(b) * width;
    const double e1 = b + 1 == bins ? hi : e0 + width;
    total += std::abs(counts[b] / count - (normal_cdf(e1) - normal_cdf(e0)));
  }
  return 0.5 * total.value();
}

double tv_point(std::span<const double> x, TvMethod method, std::size_t grid_points) {
  return method == TvMethod::kde ? kde_tv(x, grid_points) : histogram_tv(x);
}

}  // namespace

Estimate tv_estimate(std::span<const double> samples, TvMethod method, const TvOptions& options) {
  require_samples(samples);
  if (options.grid_points < 16) throw DomainError("TV grid needs at least 16 points");
  const double value = tv_point(samples, method, options.grid_points);
  if (method == TvMethod::kde && options.check_grid) {
    const double refined = tv_point(samples, method, 2 * options.grid_points);
    if (std::abs(refined - value) >= 1e-4) {
      throw CapacityError("TV integration grid too coarse: doubling moved the estimate by " +
                          std::to_string(std::abs(refined - value)));
    }
  }
  const std::size_t parts = std::max<std::size_t>(2, options.sub_batches);
  const std::size_t per = samples.size() / parts;
  CompensatedSum<> s, ss;
  for (std::size_t b = 0; b < parts; ++b) {
    const double v = tv_point(samples.subspan(b * per, per), method, options.grid_points);
    s += v;
    ss += v * v;
  }
  const double k = static_cast<double>(parts);
  const double mean = s.value() / k;
  const double var = std::max(0.0, (ss.value() - k * mean * mean) / (k - 1.0));
  return Estimate{value, std::sqrt(var / k)};
}

Estimate kolmogorov_distance(std::span<const double> samples) {
  require_samples(samples);
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double count = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / count - cdf, cdf - static_cast<double>(i) / count});
  }
  const double dkw = std::sqrt(std::log(2.0 / 0.05) / (2.0 * count));
  return Estimate{d, dkw};
}

TrigGaps trig_gaps(std::span<const double> samples) {
  require_samples(samples);
  CompensatedSum<> s, ss, c, cc;
  for (double v : samples) {
    const double sv = std::sin(v), cv = std::cos(v);
    s += sv;
    ss += sv * sv;
    c += cv;
    cc += cv * cv;
  }
  const double count = static_cast<double>(samples.size());
  const double ms = s.value() / count, mc = c.value() / count;
  const double vs = std::max(0.0, ss.value() / count - ms * ms) * count / (count - 1.0);
  const double vc = std::max(0.0, cc.value() / count - mc * mc) * count / (count - 1.0);
  return TrigGaps{ms, std::sqrt(vs / count), mc - std::exp(-0.5), std::sqrt(vc / count)};
}

double tv_lower_bound_trig(const TrigGaps& gaps) {
  return 0.5 * std::max(std::abs(gaps.sin_gap), std::abs(gaps.cos_gap));
}

FmtBounds fmt_upper_bound(int q, double kappa4) {
  if (q < 2) throw DomainError("fourth moment bound requires q >= 2");
  if (!(kappa4 >= 0.0)) throw DomainError("fourth cumulant must be non-negative");
  const double root = std::sqrt(kappa4);
  return FmtBounds{std::sqrt((4.0 * q - 4.0) / (3.0 * q)) * root, 2.0 / std::sqrt(3.0) * root};
}

double bias_allowance(std::size_t count) {
  return 0.01 * std::pow(1e6 / static_cast<double>(count), 0.4);
}

NullCalibration calibrate_null(std::size_t count, std::uint64_t seed, TvMethod method) {
  const auto sample = sample_normal(0.0, count, seed);
  const double est = tv_estimate(sample, method).value;
  const double allowance = bias_allowance(count);
  return NullCalibration{count, est, allowance, est <= allowance};
}

DistanceReport make_distance_report(const SampleBatch& batch, const CumulantReport& cumulants,
                                    TvMethod method, const TvOptions& options) {
  const std::span<const double> x = batch.replicates;
  const Estimate tv = tv_estimate(x, method, options);
  const Estimate kol = kolmogorov_distance(x);
  const TrigGaps gaps = trig_gaps(x);
  const FmtBounds bounds = fmt_upper_bound(batch.spec.q, std::max(0.0, cumulants.kappa4));
  const double ratio = cumulants.m_stat > 0.0 ? tv.value / cumulants.m_stat : 0.0;
  return DistanceReport{batch.spec,      method,       x.size(),          tv,           kol,
                        gaps.sin_gap,    gaps.sin_se,  gaps.cos_gap,      gaps.cos_se,  tv_lower_bound_trig(gaps),
                        bounds.upper,    bounds.upper_simple, bias_allowance(x.size()), ratio};
}

}  // namespace fmtv
