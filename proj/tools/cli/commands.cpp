#include "cli/commands.hpp"

#include <cmath>
#include <mutex>
#include <optional>
#include <ostream>

#include "cli/output.hpp"
#include "fmtv/diagrams.hpp"
#include "fmtv/distances.hpp"
#include "fmtv/errors.hpp"
#include "fmtv/normal.hpp"
#include "fmtv/parallel.hpp"
#include "fmtv/rates.hpp"
#include "fmtv/rng.hpp"
#include "fmtv/sampler.hpp"
#include "fmtv/stein.hpp"

namespace fmtv::cli {

using nlohmann::ordered_json;

namespace {

constexpr std::size_t kMinDistanceReplicates = 10000;
constexpr std::size_t kMinRatePoints = 5;
// Stream id of the null self-test, disjoint from every spec_seed.
constexpr std::uint64_t kNullStream = 0x6e756c6c00000000ULL;

struct SpecKey {
  int q;
  double h;
  std::size_t n;
};

std::vector<SpecKey> spec_list(const ExperimentConfig& c) {
  std::vector<SpecKey> out;
  for (int q : c.qs)
    for (double h : c.hursts)
      for (std::size_t n : c.n_grid) out.push_back({q, h, n});
  return out;
}

Provenance provenance(const ExperimentConfig& c) { return Provenance{config_hash(c), c.seed}; }

ordered_json json_header(const std::string& kind, const ExperimentConfig& c) {
  const Provenance p = provenance(c);
  return ordered_json{{"kind", kind}, {"format_version", 1}, {"config_hash", p.hash_hex()}, {"seed", c.seed}};
}

void print_warnings(const ExperimentConfig& c, std::ostream& log) {
  for (const std::string& w : c.warnings) log << "warning: " << w << '\n';
}

std::filesystem::path sample_path(const ExperimentConfig& c, const SpecKey& k, SampleFormat format) {
  return c.output_dir / "samples" /
         (spec_stem(k.q, k.h, k.n) + (format == SampleFormat::csv ? ".csv" : ".fnsd"));
}

// Cumulants for a distance report: exact within the cap, sampled above it.
CumulantReport report_cumulants(const SampleBatch& batch, std::size_t cap, unsigned jobs, std::string& source) {
  if (batch.spec.n <= cap) {
    source = "exact";
    return exact_cumulants(batch.spec, LatticeOptions{cap, jobs});
  }
  source = "sampled";
  const SampledCumulants sc = sample_cumulants(batch.replicates);
  const double k3 = batch.spec.q % 2 == 1 ? 0.0 : sc.kappa3;
  return CumulantReport{batch.spec, sc.kappa2, k3, sc.kappa4, std::max(std::abs(k3), sc.kappa4)};
}

}  // namespace

int cmd_cumulants(const RunOptions& opts, std::ostream& log) {
  const ExperimentConfig& c = opts.config;
  print_warnings(c, log);
  const auto keys = spec_list(c);
  for (const SpecKey& k : keys) {
    if (k.n > c.exact_n_cap) {
      throw CapacityError("n = " + std::to_string(k.n) + " exceeds exact_n_cap = " +
                          std::to_string(c.exact_n_cap) + "; exact cumulants are unavailable for this grid");
    }
    if (k.q > kMaxExactDegree) {
      throw CapacityError("q = " + std::to_string(k.q) + " exceeds the exact-cumulant limit " +
                          std::to_string(kMaxExactDegree));
    }
  }
  std::vector<std::optional<CumulantReport>> reports(keys.size());
  parallel_for_dynamic(keys.size(), opts.jobs, [&](std::size_t i, unsigned) {
    const VariationSpec spec = VariationSpec::make(keys[i].q, keys[i].h, keys[i].n);
    reports[i] = exact_cumulants(spec, LatticeOptions{c.exact_n_cap, 1});
  });

  std::string csv = csv_preamble("cumulants", kCumulantsCsvVersion, provenance(c)) + cumulants_csv_header();
  ordered_json json = json_header("cumulants", c);
  json["reports"] = ordered_json::array();
  for (const auto& r : reports) {
    csv += cumulants_csv_row(*r, "exact");
    json["reports"].push_back(to_json(*r));
  }
  write_atomic(c.output_dir / "cumulants.csv", csv);
  write_atomic(c.output_dir / "cumulants.json", json.dump(2) + "\n");
  log << "wrote " << keys.size() << " cumulant reports to " << (c.output_dir / "cumulants.csv").string() << '\n';
  return kExitOk;
}

int cmd_simulate(const RunOptions& opts, std::ostream& log) {
  const ExperimentConfig& c = opts.config;
  print_warnings(c, log);
  const Provenance p = provenance(c);
  for (const SpecKey& k : spec_list(c)) {
    const VariationSpec spec = VariationSpec::make(k.q, k.h, k.n);
    const std::uint64_t seed = spec_seed(c.seed, k.q, k.h, k.n);
    const SampleBatch batch = sample_variation(spec, c.replicates, seed, SamplerOptions{opts.jobs});
    const std::filesystem::path path = sample_path(c, k, c.sample_format);
    std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    if (c.sample_format == SampleFormat::csv) {
      write_sample_csv(tmp, batch,
                       "fmtv samples v1 config_hash=" + p.hash_hex() + " seed=" + std::to_string(c.seed) +
                           " q=" + std::to_string(k.q) + " H=" + fmt(k.h) + " n=" + std::to_string(k.n));
    } else {
      write_sample_dump(tmp, batch);
    }
    std::filesystem::rename(tmp, path);
    log << "wrote " << batch.count << " replicates to " << path.string() << '\n';
  }
  return kExitOk;
}

int cmd_distance(const RunOptions& opts, std::ostream& log) {
  const ExperimentConfig& c = opts.config;
  if (c.replicates < kMinDistanceReplicates) {
    throw ConfigError("distance needs replicates >= " + std::to_string(kMinDistanceReplicates));
  }
  print_warnings(c, log);

  const NullCalibration null = calibrate_null(c.replicates, stream_key(c.seed, kNullStream), c.tv_method);
  log << "null self-test: tv = " << fmt(null.estimate) << ", allowance = " << fmt(null.allowance)
      << (null.passed ? " (pass)" : " (FAIL)") << '\n';
  if (!null.passed) throw CapacityError("TV estimator null self-test failed; refusing to report distances");

  const auto keys = spec_list(c);
  std::vector<SampleBatch> batches;
  for (const SpecKey& k : keys) {
    const VariationSpec spec = VariationSpec::make(k.q, k.h, k.n);
    const auto bin = sample_path(c, k, SampleFormat::binary);
    const auto csv = sample_path(c, k, SampleFormat::csv);
    if (std::filesystem::exists(bin)) {
      SampleBatch b = read_sample_dump(bin);
      if (b.spec.q != k.q || b.spec.n != k.n || b.spec.hurst.value() != k.h) {
        throw CapacityError(bin.string() + " holds a different spec");
      }
      batches.push_back(std::move(b));
    } else if (std::filesystem::exists(csv)) {
      batches.push_back(read_sample_csv(csv, spec));
    } else if (opts.simulate) {
      batches.push_back(
          sample_variation(spec, c.replicates, spec_seed(c.seed, k.q, k.h, k.n), SamplerOptions{opts.jobs}));
    } else {
      throw CapacityError("missing samples " + bin.string() + "; run 'simulate' first or pass --simulate");
    }
  }

  std::string out = csv_preamble("distance", kDistanceCsvVersion, provenance(c)) + distance_csv_header();
  ordered_json json = json_header("distance", c);
  json["null_self_test"] = {{"count", null.count},
                            {"estimate", null.estimate},
                            {"allowance", null.allowance},
                            {"passed", null.passed}};
  json["reports"] = ordered_json::array();
  for (const SampleBatch& b : batches) {
    std::string source;
    const CumulantReport cum = report_cumulants(b, c.exact_n_cap, opts.jobs, source);
    const DistanceReport r = make_distance_report(b, cum, c.tv_method);
    out += distance_csv_row(r);
    ordered_json j = to_json(r);
    j["cumulants"] = to_json(cum);
    j["cumulant_source"] = source;
    json["reports"].push_back(std::move(j));
  }
  write_atomic(c.output_dir / "distance.csv", out);
  write_atomic(c.output_dir / "distance.json", json.dump(2) + "\n");
  log << "wrote " << batches.size() << " distance reports to " << (c.output_dir / "distance.csv").string()
      << '\n';
  return kExitOk;
}

int cmd_rates(const RunOptions& opts, std::ostream& log) {
  const ExperimentConfig& c = opts.config;
  if (c.n_grid.size() < kMinRatePoints) {
    throw ConfigError("rates needs at least " + std::to_string(kMinRatePoints) + " n_grid points, got " +
                      std::to_string(c.n_grid.size()));
  }
  if (c.replicates < kMinDistanceReplicates) {
    throw ConfigError("rates needs replicates >= " + std::to_string(kMinDistanceReplicates));
  }
  print_warnings(c, log);

  GridConfig grid;
  grid.qs = c.qs;
  grid.hursts = c.hursts;
  grid.n_grid = c.n_grid;
  grid.replicates = c.replicates;
  grid.seed = c.seed;
  grid.exact_n_cap = c.exact_n_cap;
  grid.tv_method = c.tv_method;
  grid.jobs = opts.jobs;

  const ordered_json header = json_header("rates-job", c);
  std::size_t finished = 0;
  const std::size_t total = c.qs.size() * c.hursts.size() * c.n_grid.size();
  const GridResult result = run_grid(grid, [&](const SpecResult& r) {
    ordered_json j = header;
    j["result"] = to_json(r);
    char name[32];
    std::snprintf(name, sizeof name, "job_%06zu.json", r.job_id);
    write_atomic(c.output_dir / "jobs" / name, j.dump(2) + "\n");
    ++finished;
    log << "[" << finished << "/" << total << "] q=" << r.spec.q << " H=" << fmt(r.spec.hurst.value())
        << " n=" << r.spec.n << (r.error.empty() ? "" : " failed: " + r.error) << '\n';
  });

  const Provenance p = provenance(c);
  std::string rates = csv_preamble("rates_summary", kRatesCsvVersion, p) + rates_csv_header();
  for (const RateFit& f : result.fits) {
    const GridSummary* summary = nullptr;
    for (const GridSummary& s : result.summaries) {
      if (s.q == f.q && s.hurst == f.hurst) summary = &s;
    }
    rates += rates_csv_row(f, *summary);
  }
  std::string sandwich = csv_preamble("sandwich", kSandwichCsvVersion, p) + sandwich_csv_header();
  for (const SpecResult& r : result.specs) {
    if (r.error.empty() && r.distance) sandwich += sandwich_csv_row(r);
  }

  ordered_json json = json_header("rates", c);
  json["fits"] = ordered_json::array();
  for (const RateFit& f : result.fits) json["fits"].push_back(to_json(f));
  json["summaries"] = ordered_json::array();
  for (const GridSummary& s : result.summaries) {
    json["summaries"].push_back({{"q", s.q},
                                 {"H", s.hurst},
                                 {"ratio_stable", s.ratio_stable},
                                 {"ratio_min", s.ratio_min},
                                 {"ratio_max", s.ratio_max},
                                 {"max_exponent_discrepancy", s.max_exponent_discrepancy}});
  }
  json["failures"] = result.failures;

  write_atomic(c.output_dir / "rates_summary.csv", rates);
  write_atomic(c.output_dir / "sandwich.csv", sandwich);
  write_atomic(c.output_dir / "rates.json", json.dump(2) + "\n");
  log << "wrote " << result.fits.size() << " fits to " << (c.output_dir / "rates_summary.csv").string() << '\n';
  if (!result.failures.empty()) {
    log << result.failures.size() << " spec(s) failed:\n";
    for (const std::string& f : result.failures) log << "  " << f << '\n';
    if (result.failures.size() == result.specs.size()) return kExitRuntime;
  }
  return kExitOk;
}

int cmd_stein_check(const RunOptions& opts, std::ostream& out, std::ostream& log) {
  // Tolerances of the certificate.
  constexpr double kConstTol = 1e-6;
  constexpr double kSupBound = 2.0;
  constexpr double kSupTol = 1e-4;
  constexpr double kRatioTol = 1e-6;
  constexpr double kQuadratureTol = 1e-10;
  const double ratio_f_bound = std::sqrt(std::acos(-1.0) / 2.0);
  const double ratio_fprime_bound = 2.0;
  const double stated_m2 = 1.0 / std::sqrt(std::exp(1.0));

  ordered_json cert{{"kind", "stein-check"}, {"format_version", 1}};
  bool all = true;
  auto check = [&](const std::string& name, double value, double target, double tol, bool upper_only) {
    const bool pass = upper_only ? value <= target + tol : std::abs(value - target) <= tol;
    all = all && pass;
    return ordered_json{{"name", name},   {"value", value}, {"target", target},
                        {"tolerance", tol}, {"kind", upper_only ? "upper_bound" : "equality"}, {"passed", pass}};
  };

  const FsinConstants k = fsin_constants();
  cert["fsin"] = ordered_json::array();
  cert["fsin"].push_back(check("E[f''_sin(N)]", k.m2, stated_m2, kConstTol, false));
  cert["fsin"].back()["closed_form"] = "-(1/3) E[sin(N) H_3(N)] = 1/(3 sqrt(e))";
  cert["fsin"].back()["closed_form_value"] = 1.0 / (3.0 * std::sqrt(std::exp(1.0)));
  cert["fsin"].back()["direct_integration"] = k.m2_direct;
  cert["fsin"].push_back(check("E[f'''_sin(N)]", k.m3, 0.0, kConstTol, false));
  cert["fsin"].back()["direct_integration"] = k.m3_direct;
  cert["fsin"].push_back(check("sup|f''_sin| on [-8,8]", k.sup2, kSupBound, kSupTol, true));
  cert["fsin"].back()["finite_difference"] = k.sup2_fd;
  cert["fsin"].push_back(check("sup|f'''_sin| on [-8,8]", k.sup3, kSupBound, kSupTol, true));
  cert["fsin"].back()["finite_difference"] = k.sup3_fd;

  cert["dictionary"] = ordered_json::array();
  for (const NamedFunction& fn : stein_dictionary()) {
    const SteinSolution sol = stein_solve(fn.g);
    const SteinRatios r = stein_bound_check(sol);
    const double mean200 = gauss_hermite(200).expectation(fn.g);
    const double mean400 = gauss_hermite(400).expectation(fn.g);
    const bool pass_f = r.ratio_f <= ratio_f_bound + kRatioTol;
    const bool pass_fp = r.ratio_fprime <= ratio_fprime_bound + kRatioTol;
    const bool pass_q = std::abs(mean200 - mean400) < kQuadratureTol;
    all = all && pass_f && pass_fp && pass_q;
    cert["dictionary"].push_back({{"function", fn.name},
                                  {"mean", sol.g_mean},
                                  {"sup_h", sol.g_norm},
                                  {"ratio_f", r.ratio_f},
                                  {"ratio_f_bound", ratio_f_bound},
                                  {"ratio_fprime", r.ratio_fprime},
                                  {"ratio_fprime_bound", ratio_fprime_bound},
                                  {"ode_residual", ode_residual(sol)},
                                  {"quadrature_change", std::abs(mean200 - mean400)},
                                  {"passed", pass_f && pass_fp && pass_q}});
  }
  cert["all_passed"] = all;

  const std::string text = cert.dump(2) + "\n";
  write_atomic(opts.config.output_dir / "stein_check.json", text);
  out << text;
  log << "stein-check: " << (all ? "all checks passed" : "some checks failed; see certificate") << '\n';
  return kExitOk;
}

int run_command(const std::string& name, const RunOptions& opts, std::ostream& out, std::ostream& log) {
  try {
    if (name == "cumulants") return cmd_cumulants(opts, log);
    if (name == "simulate") return cmd_simulate(opts, log);
    if (name == "distance") return cmd_distance(opts, log);
    if (name == "rates") return cmd_rates(opts, log);
    if (name == "stein-check") return cmd_stein_check(opts, out, log);
    log << "error: unknown command '" << name << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    log << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace fmtv::cli
