#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fluxfsp/adaptive.hpp"
#include "fluxfsp/state_set.hpp"

namespace fluxfsp::cli {

/// Shortest text that parses back to exactly v.
std::string format_double(double v);

/// "snapshot_<t>.csv" with t in shortest fixed notation.
std::string snapshot_filename(double t);

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<std::string>& species,
                          std::span<const TrajectoryRow> rows);

/// One row per state (lexicographic order): counts, then probability.
void write_snapshot_csv(const std::filesystem::path& path,
                        const std::vector<std::string>& species, const StateSet& states,
                        std::span<const double> p);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fluxfsp::cli
