#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmtv/distances.hpp"

namespace fmtv::cli {

/// Malformed or invalid configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SampleFormat { binary, csv };

struct ExperimentConfig {
  std::vector<int> qs;
  std::vector<double> hursts;
  std::vector<std::size_t> n_grid;
  std::size_t replicates = 100000;
  std::uint64_t seed = 1;
  std::size_t exact_n_cap = 8192;
  std::filesystem::path output_dir = "fmtv_out";
  TvMethod tv_method = TvMethod::kde;
  SampleFormat sample_format = SampleFormat::binary;

  /// Non-fatal findings from validation (e.g. a non-geometric n_grid).
  std::vector<std::string> warnings;
};

/// qs {2,3}, Hs {0.5,0.7}, n_grid {64,...,1024}, 10^5 replicates.
ExperimentConfig default_config();

/// Flat "key = value" lines; '#' starts a comment; lists are comma separated.
/// Keys: qs, Hs, n_grid, replicates, seed, exact_n_cap, output_dir, tv_method,
/// sample_format. Unknown or repeated keys are errors. Keys not given keep
/// their default_config() value.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks every invariant; collects warnings. Throws ConfigError.
void validate(ExperimentConfig& config);

/// Canonical key = value rendering. output_dir is omitted so that moving the
/// output does not change the hash.
std::string canonical_text(const ExperimentConfig& config);

/// 64-bit FNV-1a of canonical_text.
std::uint64_t config_hash(const ExperimentConfig& config);

bool is_geometric(const std::vector<std::size_t>& grid);

}  // namespace fmtv::cli
