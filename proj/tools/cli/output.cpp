#include "cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "fmtv/errors.hpp"

namespace fmtv::cli {

using nlohmann::ordered_json;

std::string Provenance::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash));
  return buf;
}

std::string csv_preamble(const std::string& kind, int version, const Provenance& p) {
  return "# fmtv " + kind + " v" + std::to_string(version) + " config_hash=" + p.hash_hex() +
         " seed=" + std::to_string(p.seed) + "\n";
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CapacityError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw CapacityError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CapacityError("cannot rename " + tmp.string() + ": " + ec.message());
}

namespace {
// Free text in a CSV cell: commas and newlines become ';' and ' '.
std::string cell(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}
}  // namespace

std::string spec_stem(int q, double hurst, std::size_t n) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "q%d_H%.10g_n%zu", q, hurst, n);
  return buf;
}

ordered_json to_json(const VariationSpec& s) {
  return ordered_json{{"q", s.q}, {"H", s.hurst.value()}, {"n", s.n}, {"v_n", s.v_n}};
}

ordered_json to_json(const CumulantReport& r) {
  return ordered_json{{"spec", to_json(r.spec)},
                      {"kappa2", r.kappa2},
                      {"kappa3", r.kappa3},
                      {"kappa4", r.kappa4},
                      {"m_stat", r.m_stat}};
}

namespace {
ordered_json estimate(const Estimate& e) {
  return ordered_json{{"value", e.value}, {"uncertainty", e.uncertainty}};
}
}  // namespace

ordered_json to_json(const DistanceReport& r) {
  return ordered_json{{"spec", to_json(r.spec)},
                      {"method", to_string(r.method)},
                      {"count", r.count},
                      {"tv_density", estimate(r.tv_density)},
                      {"kolmogorov", estimate(r.kolmogorov)},
                      {"sin_gap", {{"value", r.sin_gap}, {"se", r.sin_se}}},
                      {"cos_gap", {{"value", r.cos_gap}, {"se", r.cos_se}}},
                      {"tv_lower_trig", r.tv_lower_trig},
                      {"fmt_upper", r.fmt_upper},
                      {"fmt_upper_simple", r.fmt_upper_simple},
                      {"bias_allowance", r.bias_allowance},
                      {"sandwich_ratio", r.sandwich_ratio}};
}

ordered_json to_json(const SpecResult& r) {
  ordered_json j{{"job_id", r.job_id},
                 {"spec", to_json(r.spec)},
                 {"cumulant_source", r.cumulant_source},
                 {"cumulants", to_json(r.cumulants)},
                 {"kappa3_se", r.kappa3_se},
                 {"kappa4_se", r.kappa4_se}};
  j["distance"] = r.distance ? to_json(*r.distance) : ordered_json(nullptr);
  j["flags"] = r.flags;
  j["error"] = r.error;
  return j;
}

ordered_json to_json(const RateFit& f) {
  return ordered_json{{"statistic", to_string(f.statistic)},
                      {"q", f.q},
                      {"H", f.hurst},
                      {"n_grid", f.n_grid},
                      {"status", f.status},
                      {"regime", f.regime_label},
                      {"theoretical_exponent", f.theoretical_exponent},
                      {"log_power", f.log_power},
                      {"fitted_exponent", f.fit.exponent},
                      {"stderr", f.fit.stderr_},
                      {"points_used", f.fit.points_used},
                      {"drift_trimmed", f.fit.drift_trimmed},
                      {"geometric_grid", f.fit.geometric},
                      {"tolerance", f.tolerance},
                      {"within_tolerance", f.within_tolerance}};
}

std::string cumulants_csv_header() { return "q,H,n,v_n,kappa2,kappa3,kappa4,m_stat,source\n"; }

std::string cumulants_csv_row(const CumulantReport& r, const std::string& source) {
  return std::to_string(r.spec.q) + "," + fmt(r.spec.hurst.value()) + "," + std::to_string(r.spec.n) + "," +
         fmt(r.spec.v_n) + "," + fmt(r.kappa2) + "," + fmt(r.kappa3) + "," + fmt(r.kappa4) + "," +
         fmt(r.m_stat) + "," + source + "\n";
}

std::string distance_csv_header() {
  return "q,H,n,method,count,tv_density,tv_uncertainty,kolmogorov,kolmogorov_uncertainty,sin_gap,sin_se,"
         "cos_gap,cos_se,tv_lower_trig,fmt_upper,fmt_upper_simple,bias_allowance,sandwich_ratio\n";
}

std::string distance_csv_row(const DistanceReport& r) {
  return std::to_string(r.spec.q) + "," + fmt(r.spec.hurst.value()) + "," + std::to_string(r.spec.n) + "," +
         to_string(r.method) + "," + std::to_string(r.count) + "," + fmt(r.tv_density.value) + "," +
         fmt(r.tv_density.uncertainty) + "," + fmt(r.kolmogorov.value) + "," + fmt(r.kolmogorov.uncertainty) +
         "," + fmt(r.sin_gap) + "," + fmt(r.sin_se) + "," + fmt(r.cos_gap) + "," + fmt(r.cos_se) + "," +
         fmt(r.tv_lower_trig) + "," + fmt(r.fmt_upper) + "," + fmt(r.fmt_upper_simple) + "," +
         fmt(r.bias_allowance) + "," + fmt(r.sandwich_ratio) + "\n";
}

std::string rates_csv_header() {
  return "q,H,statistic,status,regime,theoretical_exponent,log_power,fitted_exponent,stderr,tolerance,"
         "within_tolerance,points_used,drift_trimmed,geometric_grid,n_min,n_max,ratio_stable,ratio_min,"
         "ratio_max,max_exponent_discrepancy\n";
}

std::string rates_csv_row(const RateFit& f, const GridSummary& s) {
  const double n_min = f.n_grid.empty() ? 0.0 : f.n_grid.front();
  const double n_max = f.n_grid.empty() ? 0.0 : f.n_grid.back();
  return std::to_string(f.q) + "," + fmt(f.hurst) + "," + to_string(f.statistic) + "," + cell(f.status) + "," +
         cell(f.regime_label) + "," + fmt(f.theoretical_exponent) + "," + std::to_string(f.log_power) + "," +
         fmt(f.fit.exponent) + "," + fmt(f.fit.stderr_) + "," + fmt(f.tolerance) + "," +
         (f.within_tolerance ? "1" : "0") + "," + std::to_string(f.fit.points_used) + "," +
         (f.fit.drift_trimmed ? "1" : "0") + "," + (f.fit.geometric ? "1" : "0") + "," + fmt(n_min) + "," +
         fmt(n_max) + "," + (s.ratio_stable ? "1" : "0") + "," + fmt(s.ratio_min) + "," + fmt(s.ratio_max) +
         "," + fmt(s.max_exponent_discrepancy) + "\n";
}

std::string sandwich_csv_header() {
  return "q,H,n,kappa3,kappa4,m_stat,cumulant_source,count,tv_estimate,tv_uncertainty,ratio,tv_lower_trig,"
         "fmt_upper,flags\n";
}

std::string sandwich_csv_row(const SpecResult& r) {
  std::string flags;
  for (const std::string& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
  const DistanceReport& d = *r.distance;
  return std::to_string(r.spec.q) + "," + fmt(r.spec.hurst.value()) + "," + std::to_string(r.spec.n) + "," +
         fmt(r.cumulants.kappa3) + "," + fmt(r.cumulants.kappa4) + "," + fmt(r.cumulants.m_stat) + "," +
         r.cumulant_source + "," + std::to_string(d.count) + "," + fmt(d.tv_density.value) + "," +
         fmt(d.tv_density.uncertainty) + "," + fmt(d.sandwich_ratio) + "," + fmt(d.tv_lower_trig) + "," +
         fmt(d.fmt_upper) + "," + cell(flags) + "\n";
}

}  // namespace fmtv::cli
