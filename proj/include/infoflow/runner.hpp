#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace infoflow {

/// Command-line overrides applied on top of the experiment config.
struct RunOverrides {
  std::optional<std::string> experiment;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  unsigned threads = 0;
  bool strict = true;  // fail on measurability collisions
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Reads a JSON experiment config, runs the named experiment, writes CSV
/// artifacts named <experiment>_<name>.csv plus manifest.json into out_dir.
/// Returns 0 on success, 1 on configuration/validation errors, 2 on runtime
/// errors. Output bytes depend only on (config, overrides.seed/paths), never
/// on the thread count.
int run_experiment(const std::filesystem::path& config_path,
                   const std::filesystem::path& out_dir,
                   const RunOverrides& overrides, std::ostream& log);

}  // namespace infoflow
