#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fmtv::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

template <class T>
T parse_integer(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("'" + key + "': expected an integer, got '" + text + "'");
  }
  return value;
}

double parse_real(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty() || !std::isfinite(value)) {
    throw ConfigError("'" + key + "': expected a real number, got '" + text + "'");
  }
  return value;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.qs = {2, 3};
  c.hursts = {0.5, 0.7};
  c.n_grid = {64, 128, 256, 512, 1024};
  return c;
}

bool is_geometric(const std::vector<std::size_t>& grid) {
  if (grid.size() < 3) return true;
  const double ratio = static_cast<double>(grid[1]) / static_cast<double>(grid[0]);
  for (std::size_t i = 2; i < grid.size(); ++i) {
    const double r = static_cast<double>(grid[i]) / static_cast<double>(grid[i - 1]);
    if (std::abs(r - ratio) > 1e-6 * ratio) return false;
  }
  return true;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c = default_config();
  std::set<std::string> seen;
  std::stringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "' given twice");
    }
    if (key == "qs") {
      c.qs.clear();
      for (const auto& s : split_list(value)) c.qs.push_back(parse_integer<int>(key, s));
    } else if (key == "Hs") {
      c.hursts.clear();
      for (const auto& s : split_list(value)) c.hursts.push_back(parse_real(key, s));
    } else if (key == "n_grid") {
      c.n_grid.clear();
      for (const auto& s : split_list(value)) c.n_grid.push_back(parse_integer<std::size_t>(key, s));
    } else if (key == "replicates") {
      c.replicates = parse_integer<std::size_t>(key, value);
    } else if (key == "seed") {
      c.seed = parse_integer<std::uint64_t>(key, value);
    } else if (key == "exact_n_cap") {
      c.exact_n_cap = parse_integer<std::size_t>(key, value);
    } else if (key == "output_dir") {
      if (value.empty()) throw ConfigError("'output_dir' is empty");
      c.output_dir = value;
    } else if (key == "tv_method") {
      try {
        c.tv_method = parse_tv_method(value);
      } catch (const std::exception&) {
        throw ConfigError("'tv_method' must be kde or histogram, got '" + value + "'");
      }
    } else if (key == "sample_format") {
      if (value == "binary") {
        c.sample_format = SampleFormat::binary;
      } else if (value == "csv") {
        c.sample_format = SampleFormat::csv;
      } else {
        throw ConfigError("'sample_format' must be binary or csv, got '" + value + "'");
      }
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(ExperimentConfig& c) {
  if (c.qs.empty()) throw ConfigError("'qs' is empty");
  if (c.hursts.empty()) throw ConfigError("'Hs' is empty");
  if (c.n_grid.empty()) throw ConfigError("'n_grid' is empty");
  for (int q : c.qs) {
    if (q < 2) throw ConfigError("every q must be >= 2, got " + std::to_string(q));
  }
  for (double h : c.hursts) {
    if (!(h > 0.0 && h < 1.0)) throw ConfigError("every H must lie in (0, 1), got " + format_real(h));
  }
  for (std::size_t n : c.n_grid) {
    if (n < 1) throw ConfigError("every n must be >= 1");
  }
  if (c.replicates < 1) throw ConfigError("'replicates' must be >= 1");
  if (c.exact_n_cap < 1) throw ConfigError("'exact_n_cap' must be >= 1");
  c.warnings.clear();
  if (!std::is_sorted(c.n_grid.begin(), c.n_grid.end()) ||
      std::adjacent_find(c.n_grid.begin(), c.n_grid.end()) != c.n_grid.end()) {
    c.warnings.push_back("n_grid is not strictly increasing");
  } else if (!is_geometric(c.n_grid)) {
    c.warnings.push_back("n_grid is not geometric; exponent fits are still computed");
  }
}

std::string canonical_text(const ExperimentConfig& c) {
  std::string out = "qs = ";
  for (std::size_t i = 0; i < c.qs.size(); ++i) out += (i ? "," : "") + std::to_string(c.qs[i]);
  out += "\nHs = ";
  for (std::size_t i = 0; i < c.hursts.size(); ++i) out += (i ? "," : "") + format_real(c.hursts[i]);
  out += "\nn_grid = ";
  for (std::size_t i = 0; i < c.n_grid.size(); ++i) out += (i ? "," : "") + std::to_string(c.n_grid[i]);
  out += "\nreplicates = " + std::to_string(c.replicates);
  out += "\nseed = " + std::to_string(c.seed);
  out += "\nexact_n_cap = " + std::to_string(c.exact_n_cap);
  out += "\ntv_method = " + to_string(c.tv_method);
  out += std::string("\nsample_format = ") + (c.sample_format == SampleFormat::csv ? "csv" : "binary");
  out += "\n";
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_text(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace fmtv::cli
