#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluxfsp/adaptive.hpp"
#include "fluxfsp/network.hpp"
#include "fluxfsp/reference.hpp"

namespace fluxfsp::cli {

/// Everything a subcommand needs. Loaded from an optional JSON file, then
/// overridden by command-line flags.
struct RunConfig {
  /// Built-in model name; exclusive with model_file.
  std::optional<std::string> model;
  std::optional<std::filesystem::path> model_file;
  double toggle_eta = 1.0;

  SolverConfig solver;

  std::filesystem::path output_dir = ".";
  bool write_snapshots = true;

  /// Required by validate.
  std::optional<BoxSpec> box;
  ReferenceOptions reference;

  std::vector<std::size_t> bench_sizes{1, 1400};
  int bench_trials = 100;

  /// Throws ConfigError unless exactly one model source is set and the
  /// solver settings are in range.
  void validate() const;
};

/// Parses the JSON config format (see README). Unknown keys are rejected.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

ReferenceMethod parse_reference_method(std::string_view name);

Model resolve_model(const RunConfig& config);

}  // namespace fluxfsp::cli
