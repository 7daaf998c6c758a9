#include "fmtv/rates.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>

#include "fmtv/errors.hpp"
#include "fmtv/parallel.hpp"
#include "fmtv/rng.hpp"

namespace fmtv {

std::string to_string(Statistic s) {
  switch (s) {
    case Statistic::kappa3: return "kappa3";
    case Statistic::kappa4: return "kappa4";
    case Statistic::tv: return "tv";
  }
  return "?";
}

int compare_orders(const RateOrder& a, const RateOrder& b) {
  if (std::abs(a.exponent - b.exponent) > 1e-12) return a.exponent < b.exponent ? -1 : 1;
  if (a.log_power != b.log_power) return a.log_power < b.log_power ? -1 : 1;
  return 0;
}

namespace {

constexpr double kBoundaryTol = 1e-9;

// Piecewise table: below `lower` -> `below`; at it -> (same exponent, `log_at`);
// above -> `above(H)`.
struct Piece {
  double boundary;
  int log_power_at;
};

RateOrder order(double exponent, int log_power, std::string regime) {
  return RateOrder{exponent, log_power, std::move(regime), false};
}

std::vector<double> boundaries(int q, Statistic s) {
  const double qd = q;
  switch (s) {
    case Statistic::kappa3: return {1.0 - 2.0 / (3.0 * qd)};
    case Statistic::kappa4:
      if (q <= 3) return {1.0 - 3.0 / (4.0 * qd)};
      return {0.75, 1.0 - 1.0 / (2.0 * qd - 2.0)};
    case Statistic::tv: return {q == 2 ? 2.0 / 3.0 : 0.75};
  }
  return {};
}

}  // namespace

RateOrder theoretical_exponent(int q, double h, Statistic statistic) {
  if (q < 2) throw DomainError("rate tables need q >= 2");
  const double qd = q;
  const double threshold = 1.0 - 1.0 / (2.0 * qd);
  if (!(h > 0.0) || h >= threshold - kBoundaryTol) {
    throw RegimeError("H = " + std::to_string(h) + " is outside the tabulated CLT regime (0, 1 - 1/(2q))");
  }
  auto at = [](double a, double b) { return std::abs(a - b) <= kBoundaryTol; };

  switch (statistic) {
    case Statistic::kappa3: {
      if (q % 2 == 1) {
        RateOrder r = order(0.0, 0, "q odd: kappa3 = 0");
        r.vanishes = true;
        return r;
      }
      const double b = 1.0 - 2.0 / (3.0 * qd);
      if (at(h, b)) return order(-0.5, 2, "H=1-2/(3q)");
      if (h < b) return order(-0.5, 0, "0<H<1-2/(3q)");
      return order(1.5 - 3.0 * qd + 3.0 * qd * h, 0, "1-2/(3q)<H<1-1/(2q)");
    }
    case Statistic::kappa4: {
      const double high = 4.0 * qd * h - 4.0 * qd + 2.0;
      if (q <= 3) {
        const double b = 1.0 - 3.0 / (4.0 * qd);
        if (at(h, b)) return order(-1.0, 3, "H=1-3/(4q)");
        if (h < b) return order(-1.0, 0, "0<H<1-3/(4q)");
        return order(high, 0, "1-3/(4q)<H<1-1/(2q)");
      }
      const double b2 = 1.0 - 1.0 / (2.0 * qd - 2.0);
      if (at(h, 0.75)) return order(-1.0, 1, "H=3/4");
      if (h < 0.75) return order(-1.0, 0, "0<H<3/4");
      if (at(h, b2)) return order(4.0 * h - 4.0, 2, "H=1-1/(2q-2)");
      if (h < b2) return order(4.0 * h - 4.0, 0, "3/4<H<1-1/(2q-2)");
      return order(high, 0, "1-1/(2q-2)<H<1-1/(2q)");
    }
    case Statistic::tv: {
      if (q == 2) {
        if (at(h, 2.0 / 3.0)) return order(-0.5, 2, "H=2/3");
        if (h < 2.0 / 3.0) return order(-0.5, 0, "0<H<2/3");
        return order(6.0 * h - 4.5, 0, "2/3<H<3/4");
      }
      if (q == 3) {
        if (at(h, 0.75)) return order(-1.0, 3, "H=3/4");
        if (h < 0.75) return order(-1.0, 0, "0<H<3/4");
        return order(12.0 * h - 10.0, 0, "3/4<H<5/6");
      }
      throw NotTabulatedError("total variation rates are tabulated for q = 2 and q = 3 only");
    }
  }
  throw DomainError("unknown statistic");
}

double distance_to_regime_boundary(int q, double h, Statistic statistic) {
  double d = std::abs(1.0 - 1.0 / (2.0 * q) - h);
  for (double b : boundaries(q, statistic)) d = std::min(d, std::abs(h - b));
  return d;
}

namespace {

struct LineFit {
  double slope, stderr_;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - my - slope * (x[i] - mx);
    ssr += r * r;
  }
  const double dof = n - 2.0;
  return LineFit{slope, dof > 0.0 ? std::sqrt(ssr / dof / sxx) : 0.0};
}

}  // namespace

ExponentFit fit_exponent(std::span<const FitPoint> points, int log_power, const FitOptions& options) {
  if (points.size() < 5) throw DomainError("exponent fit needs at least 5 points");
  if (log_power < 0) throw DomainError("log power must be non-negative");
  std::vector<FitPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), [](const FitPoint& a, const FitPoint& b) { return a.n < b.n; });
  std::vector<double> x, y;
  for (const FitPoint& p : sorted) {
    if (!(p.value > 0.0) || !std::isfinite(p.value)) {
      throw DomainError("exponent fit needs positive finite values");
    }
    if (!(p.n > 1.0)) throw DomainError("exponent fit needs n > 1");
    x.push_back(std::log(p.n));
    y.push_back(std::log(p.value) - log_power * std::log(std::log(p.n)));
  }
  ExponentFit out;
  const double ratio = sorted[1].n / sorted[0].n;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (std::abs(sorted[i].n / sorted[i - 1].n - ratio) > 1e-6 * ratio) out.geometric = false;
  }

  LineFit fit = least_squares(x, y);
  out.points_used = x.size();

  if (options.trim_drift) {
    std::vector<double> local;
    for (std::size_t i = 1; i < x.size(); ++i) local.push_back((y[i] - y[i - 1]) / (x[i] - x[i - 1]));
    const auto [lo, hi] = std::minmax_element(local.begin(), local.end());
    const bool varies = *hi - *lo > 1e-9 * std::max(1.0, std::abs(fit.slope));
    bool up = true, down = true;
    for (std::size_t i = 1; i < local.size(); ++i) {
      up = up && local[i] > local[i - 1];
      down = down && local[i] < local[i - 1];
    }
    if (varies && (up || down)) {
      const std::size_t keep = std::max<std::size_t>(3, (x.size() + 1) / 2);
      const std::size_t first = x.size() - keep;
      fit = least_squares(std::span(x).subspan(first), std::span(y).subspan(first));
      out.points_used = keep;
      out.drift_trimmed = true;
    }
  }
  out.exponent = fit.slope;
  out.stderr_ = fit.stderr_;
  return out;
}

std::size_t replicates_for(double m_stat, std::size_t configured) {
  constexpr double kCap = 1e6;
  const double wanted = m_stat > 0.0 ? std::ceil(16.0 / (m_stat * m_stat)) : kCap;
  return std::max(configured, static_cast<std::size_t>(std::min(wanted, kCap)));
}

std::uint64_t spec_seed(std::uint64_t seed, int q, double hurst, std::size_t n) {
  const std::uint64_t id = mix64(static_cast<std::uint64_t>(q)) ^
                           mix64(std::bit_cast<std::uint64_t>(hurst) + 1) ^
                           mix64(static_cast<std::uint64_t>(n) * 3 + 7);
  return stream_key(seed, id);
}

namespace {

SpecResult run_spec(const GridConfig& cfg, std::size_t job_id, int q, double hurst, std::size_t n) {
  SpecResult r{job_id, VariationSpec::make(q, hurst, n), {}, "exact", 0.0, 0.0, std::nullopt, {}, {}};
  const VariationSpec& spec = r.spec;
  if (!spec.in_clt_regime()) r.flags.push_back("outside CLT regime: no distributional claim");
  const std::uint64_t seed = spec_seed(cfg.seed, q, hurst, n);
  const SamplerOptions sampler{1, 1024, 1e-9};

  std::optional<SampleBatch> batch;
  if (n <= cfg.exact_n_cap) {
    r.cumulants = exact_cumulants(spec, LatticeOptions{cfg.exact_n_cap, 1});
  } else {
    r.cumulant_source = "sampled";
    batch = sample_variation(spec, std::max<std::size_t>(cfg.replicates, 1000), seed, sampler);
    const SampledCumulants sc = sample_cumulants(batch->replicates);
    const double k3 = q % 2 == 1 ? 0.0 : sc.kappa3;
    r.cumulants = CumulantReport{spec, sc.kappa2, k3, sc.kappa4, std::max(std::abs(k3), sc.kappa4)};
    r.kappa3_se = q % 2 == 1 ? 0.0 : sc.se3;
    r.kappa4_se = sc.se4;
  }

  if (cfg.compute_distances) {
    const double m = r.cumulants.m_stat;
    if (m > 0.0 && 16.0 / (m * m) > 1e6) r.flags.push_back("distance unresolvable at desk scale");
    if (!batch) {
      const std::size_t count = r.cumulant_source == "exact" ? replicates_for(m, cfg.replicates) : cfg.replicates;
      batch = sample_variation(spec, count, seed, sampler);
    }
    r.distance = make_distance_report(*batch, r.cumulants, cfg.tv_method);
    if (m > 0.0 && r.distance->tv_density.uncertainty >= m / 4.0) {
      r.flags.push_back("tv uncertainty >= M/4");
    }
  }
  return r;
}

RateFit fit_family(Statistic stat, int q, double hurst, const std::vector<const SpecResult*>& family,
                   bool with_distances) {
  RateFit rf{stat, q, hurst, {}, {}, 0.0, 0, "", 0.0, false, "ok"};
  for (const SpecResult* s : family) rf.n_grid.push_back(static_cast<double>(s->spec.n));

  std::optional<RateOrder> theory;
  try {
    theory = theoretical_exponent(q, hurst, stat);
  } catch (const NotTabulatedError& e) {
    rf.status = "not-tabulated";
  } catch (const RegimeError& e) {
    rf.status = "out-of-regime";
  }
  if (stat == Statistic::tv && (!with_distances || rf.status == "not-tabulated")) {
    if (rf.status == "ok") rf.status = "skipped: distances not computed";
    return rf;
  }
  if (stat == Statistic::kappa3 && q % 2 == 1) {
    rf.status = "skipped: kappa3 vanishes for odd q";
    if (theory) rf.regime_label = theory->regime;
    return rf;
  }
  if (theory) {
    rf.theoretical_exponent = theory->exponent;
    rf.log_power = theory->log_power;
    rf.regime_label = theory->regime;
    const bool near = theory->log_power > 0 || distance_to_regime_boundary(q, hurst, stat) <= 0.1;
    rf.tolerance = near ? 0.15 : 0.05;
  }

  std::vector<FitPoint> points;
  for (const SpecResult* s : family) {
    if (!s->error.empty()) continue;
    double v = 0.0;
    switch (stat) {
      case Statistic::kappa3: v = std::abs(s->cumulants.kappa3); break;
      case Statistic::kappa4: v = s->cumulants.kappa4; break;
      case Statistic::tv: v = s->distance ? s->distance->tv_density.value : 0.0; break;
    }
    if (v > 0.0) points.push_back(FitPoint{static_cast<double>(s->spec.n), v});
  }
  try {
    rf.fit = fit_exponent(points, rf.log_power);
  } catch (const DomainError& e) {
    rf.status = std::string("skipped: ") + e.what();
    return rf;
  }
  if (theory) rf.within_tolerance = std::abs(rf.fit.exponent - rf.theoretical_exponent) <= rf.tolerance;
  return rf;
}

}  // namespace

GridResult run_grid(const GridConfig& cfg, const JobCallback& on_job) {
  if (cfg.qs.empty() || cfg.hursts.empty() || cfg.n_grid.empty()) {
    throw DomainError("grid needs at least one q, one H and one n");
  }
  struct Job {
    int q;
    double h;
    std::size_t n;
  };
  std::vector<Job> jobs;
  for (int q : cfg.qs)
    for (double h : cfg.hursts)
      for (std::size_t n : cfg.n_grid) jobs.push_back({q, h, n});

  GridResult out;
  out.specs.resize(jobs.size());
  std::vector<bool> done(jobs.size(), false);
  std::mutex callback_mutex;
  parallel_for_dynamic(jobs.size(), cfg.jobs, [&](std::size_t i, unsigned) {
    const Job& j = jobs[i];
    SpecResult r;
    try {
      r = run_spec(cfg, i, j.q, j.h, j.n);
    } catch (const std::exception& e) {
      r.job_id = i;
      r.error = e.what();
      r.spec.q = j.q;
      r.spec.n = j.n;
      if (j.h > 0.0 && j.h < 1.0) r.spec.hurst = Hurst(j.h);
    }
    std::lock_guard lock(callback_mutex);
    out.specs[i] = std::move(r);
    if (on_job) on_job(out.specs[i]);
  });

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!out.specs[i].error.empty()) {
      out.failures.push_back("q=" + std::to_string(jobs[i].q) + " H=" + std::to_string(jobs[i].h) +
                             " n=" + std::to_string(jobs[i].n) + ": " + out.specs[i].error);
    }
  }

  std::size_t index = 0;
  for (int q : cfg.qs) {
    for (double h : cfg.hursts) {
      std::vector<const SpecResult*> family;
      for (std::size_t k = 0; k < cfg.n_grid.size(); ++k) family.push_back(&out.specs[index++]);
      std::sort(family.begin(), family.end(),
                [](const SpecResult* a, const SpecResult* b) { return a->spec.n < b->spec.n; });

      GridSummary summary{q, h};
      for (Statistic stat : {Statistic::kappa3, Statistic::kappa4, Statistic::tv}) {
        RateFit rf = fit_family(stat, q, h, family, cfg.compute_distances);
        if (rf.status == "ok") {
          summary.max_exponent_discrepancy =
              std::max(summary.max_exponent_discrepancy, std::abs(rf.fit.exponent - rf.theoretical_exponent));
        }
        out.fits.push_back(std::move(rf));
      }

      std::vector<double> ratios;
      for (const SpecResult* s : family) {
        if (!s->error.empty() || !s->distance) continue;
        out.sandwich.push_back(SandwichRecord{q, h, s->spec.n, s->cumulants.m_stat, s->distance->tv_density.value,
                                              s->distance->tv_density.uncertainty, s->distance->sandwich_ratio});
        ratios.push_back(s->distance->sandwich_ratio);
      }
      if (!ratios.empty()) {
        summary.ratio_min = *std::min_element(ratios.begin(), ratios.end());
        summary.ratio_max = *std::max_element(ratios.begin(), ratios.end());
        const std::size_t a = ratios.size() / 4;
        const std::size_t b = std::max(a + 1, ratios.size() - ratios.size() / 4);
        const auto [cmin, cmax] = std::minmax_element(ratios.begin() + static_cast<std::ptrdiff_t>(a),
                                                      ratios.begin() + static_cast<std::ptrdiff_t>(b));
        summary.ratio_stable = summary.ratio_min >= *cmin / 2.0 && summary.ratio_max <= 2.0 * *cmax;
      }
      out.summaries.push_back(summary);
    }
  }
  return out;
}

}  // namespace fmtv
