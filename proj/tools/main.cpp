// fmtv: exact cumulants, simulated distances and rate checks for Hermite
// variations of fractional Gaussian noise.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace fmtv::cli;

  CLI::App app{"Hermite variations of fractional Gaussian noise: cumulants, distances, rates"};
  app.require_subcommand(1, 1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path;
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  bool simulate = false;

  app.add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--seed", seed, "root seed (overrides the config)");
  app.add_option("--output", output_dir, "output directory (overrides the config)");

  app.add_subcommand("cumulants", "exact kappa2..kappa4 for every (q, H, n)");
  app.add_subcommand("simulate", "write replicate dumps under <output>/samples");
  auto* distance = app.add_subcommand("distance", "distance reports from sample dumps");
  distance->add_flag("--simulate", simulate, "draw samples that are missing on disk");
  app.add_subcommand("rates", "grid run with exponent fits and sandwich ratios");
  app.add_subcommand("stein-check", "JSON certificate of the Stein constants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  RunOptions opts;
  opts.jobs = jobs;
  opts.simulate = simulate;
  try {
    opts.config = config_path.empty() ? default_config() : load_config(config_path);
    if (seed) opts.config.seed = *seed;
    if (!output_dir.empty()) opts.config.output_dir = output_dir;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  return run_command(name, opts, std::cout, std::cerr);
}
