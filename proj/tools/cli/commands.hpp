#pragma once

#include <iosfwd>
#include <string>

#include "cli/config.hpp"

namespace fmtv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct RunOptions {
  ExperimentConfig config;
  unsigned jobs = 1;
  bool simulate = false;  // distance: draw samples that are missing on disk
};

// Each command writes its files under config.output_dir, reports progress on
// `log` and returns an exit code. Exceptions escape; run_command maps them.
int cmd_cumulants(const RunOptions& opts, std::ostream& log);
int cmd_simulate(const RunOptions& opts, std::ostream& log);
int cmd_distance(const RunOptions& opts, std::ostream& log);
int cmd_rates(const RunOptions& opts, std::ostream& log);
int cmd_stein_check(const RunOptions& opts, std::ostream& out, std::ostream& log);

/// Dispatches by name. ConfigError and DomainError give kExitConfig; every
/// other exception gives kExitRuntime. The message goes to `log`.
int run_command(const std::string& name, const RunOptions& opts, std::ostream& out, std::ostream& log);

}  // namespace fmtv::cli
