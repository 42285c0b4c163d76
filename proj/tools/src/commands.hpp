#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fluxfsp/generator.hpp"
#include "fluxfsp/network.hpp"
#include "fluxfsp/state_set.hpp"
#include "run_config.hpp"

namespace fluxfsp::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitBoundViolation = 4,
};

/// A measured error exceeded its a-posteriori bound: a solver bug.
class BoundViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive solve; writes trajectory.csv, summary.json and snapshot_<t>.csv.
int cmd_run(const RunConfig& config, std::ostream& log);

/// Adaptive solve plus the fixed-box reference at every checkpoint (and tf);
/// writes validation.json. Throws BoundViolation when a measured l1 error
/// exceeds the ledger bound plus the oracle's own error.
int cmd_validate(const RunConfig& config, std::ostream& log);

/// Times forward enumeration against the all-pairs baseline; writes bench.json.
int cmd_bench_assembly(const RunConfig& config, std::ostream& log);

int cmd_models(std::ostream& out);

/// Runs body, mapping ConfigError to 2, BoundViolation to 4 and SolverError
/// (or any other exception) to 3. On failure an error record is printed to err and, when
/// possible, written to <output_dir>/error.json.
int guarded(const std::filesystem::path& output_dir, std::ostream& err,
            const std::function<int()>& body);

/// The first n states reached by breadth-first expansion from x0 (fewer if
/// the reachable set is smaller).
StateSet breadth_first_states(const ReactionNetwork& network, const State& x0, std::size_t n);

struct TimingStats {
  double median_s = 0.0;
  double mean_s = 0.0;
  double stddev_s = 0.0;
};

TimingStats summarize_timings(std::vector<double> seconds);

struct AssemblyBenchmark {
  std::size_t states = 0;
  std::size_t reactions = 0;
  TimingStats forward;
  TimingStats all_pairs;
  std::size_t forward_evaluations = 0;
  std::size_t all_pairs_evaluations = 0;
  bool identical = false;
};

AssemblyBenchmark bench_assembly(const ReactionNetwork& network, const StateSet& states,
                                 int trials);

}  // namespace fluxfsp::cli
