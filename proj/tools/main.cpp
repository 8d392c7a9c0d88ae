#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "infoflow/runner.hpp"
#include "infoflow/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Information-flow bond pricing experiment runner"};
  app.set_version_flag("--version", infoflow::kVersion);

  std::string experiment;
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  unsigned threads = 0;
  bool strict = true;

  app.add_option("experiment", experiment,
                 "Experiment to run: simulate, volatility, fisher, mutual-info, "
                 "price, surface, manipulate, validate (defaults to the config's "
                 "\"experiment\" field)");
  app.add_option("--config", config_path, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out-dir", out_dir, "Output directory for CSVs and manifest.json");
  auto* seed_opt = app.add_option("--seed", seed, "Override the config's RNG seed");
  auto* paths_opt = app.add_option("--paths", paths, "Override the config's path count");
  app.add_option("--threads", threads,
                 "Worker threads (affects speed only, never results)");
  app.add_flag("--strict,!--no-strict", strict,
               "Fail on measurability collisions (default on)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : infoflow::kExitValidation;
  }

  infoflow::RunOverrides overrides;
  if (!experiment.empty()) overrides.experiment = experiment;
  if (seed_opt->count() > 0) overrides.seed = seed;
  if (paths_opt->count() > 0) overrides.paths = paths;
  overrides.threads = threads;
  overrides.strict = strict;

  return infoflow::run_experiment(config_path, out_dir, overrides, std::cout);
}
