#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "fluxfsp/error.hpp"
#include "fluxfsp/parallel.hpp"
#include "run_config.hpp"

namespace {

using namespace fluxfsp;
using namespace fluxfsp::cli;

/// Flag values; only the ones given on the command line override the config.
struct Overrides {
  std::string config_file;
  std::optional<std::string> model;
  std::optional<std::string> model_file;
  std::optional<double> toggle_eta;
  std::optional<std::string> output;
  bool no_snapshots = false;
  std::optional<std::size_t> threads;

  std::optional<double> quantile_tol, flux_tol, dt_tol, ode_tol, dt_min, dt_max, t0, tf;
  std::optional<int> expansion_radius, prune_every, max_krylov_dim;
  std::optional<std::vector<double>> checkpoints;

  std::optional<std::vector<Count>> box_lower, box_upper;
  std::optional<std::size_t> box_max_states;
  std::optional<double> reference_tol;
  std::optional<std::string> reference_method;

  std::optional<std::vector<std::size_t>> sizes;
  std::optional<int> trials;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_file, "JSON config file; flags override it");
  auto* model = cmd->add_option("--model", o.model, "Built-in model name");
  cmd->add_option("--model-file", o.model_file, "Model definition JSON")->excludes(model);
  cmd->add_option("--toggle-eta", o.toggle_eta, "Toggle switch production scale");
  cmd->add_option("-o,--output", o.output, "Output directory");
  cmd->add_option("--threads", o.threads, "Worker threads (default: FLUXFSP_THREADS or all cores)");
}

void add_solver(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--quantile-tol", o.quantile_tol, "Mass eligible for pruning per step (alpha)");
  cmd->add_option("--flux-tol", o.flux_tol, "Flux protection fraction; 0 disables protection");
  cmd->add_option("--dt-tol", o.dt_tol, "Step tolerance: dt = dt_tol / max state flux");
  cmd->add_option("--ode-tol", o.ode_tol, "Matrix exponential tolerance per step");
  cmd->add_option("--dt-min", o.dt_min, "Smallest step");
  cmd->add_option("--dt-max", o.dt_max, "Largest step");
  cmd->add_option("--t0", o.t0, "Start time");
  cmd->add_option("--tf", o.tf, "Final time");
  cmd->add_option("--expansion-radius", o.expansion_radius, "Reaction firings added per step");
  cmd->add_option("--prune-every", o.prune_every, "Prune every N steps");
  cmd->add_option("--max-krylov-dim", o.max_krylov_dim, "Krylov subspace dimension");
  cmd->add_option("--checkpoints", o.checkpoints, "Snapshot times")->delimiter(',');
  cmd->add_flag("--no-snapshots", o.no_snapshots, "Skip snapshot_<t>.csv files");
}

RunConfig build_config(const Overrides& o) {
  RunConfig c = o.config_file.empty() ? RunConfig{} : load_run_config(o.config_file);
  if (o.model) {
    c.model = *o.model;
    c.model_file.reset();
  }
  if (o.model_file) {
    c.model_file = *o.model_file;
    c.model.reset();
  }
  if (o.toggle_eta) c.toggle_eta = *o.toggle_eta;
  if (o.output) c.output_dir = *o.output;
  if (o.no_snapshots) c.write_snapshots = false;

  auto& s = c.solver;
  if (o.quantile_tol) s.quantile_tol = *o.quantile_tol;
  if (o.flux_tol) s.flux_tol = *o.flux_tol;
  if (o.dt_tol) s.dt_tol = *o.dt_tol;
  if (o.ode_tol) s.ode_tol = *o.ode_tol;
  if (o.dt_min) s.dt_min = *o.dt_min;
  if (o.dt_max) s.dt_max = *o.dt_max;
  if (o.t0) s.t0 = *o.t0;
  if (o.tf) s.tf = *o.tf;
  if (o.expansion_radius) s.expansion_radius = *o.expansion_radius;
  if (o.prune_every) s.prune_every = *o.prune_every;
  if (o.max_krylov_dim) s.max_krylov_dim = *o.max_krylov_dim;
  if (o.checkpoints) s.checkpoint_times = *o.checkpoints;

  if (o.box_lower || o.box_upper || o.box_max_states) {
    BoxSpec box = c.box.value_or(BoxSpec{});
    if (o.box_lower) box.lower = *o.box_lower;
    if (o.box_upper) box.upper = *o.box_upper;
    if (o.box_max_states) box.max_states = *o.box_max_states;
    c.box = std::move(box);
  }
  if (o.reference_tol) c.reference.tol = *o.reference_tol;
  if (o.reference_method) c.reference.method = parse_reference_method(*o.reference_method);
  if (o.sizes) c.bench_sizes = *o.sizes;
  if (o.trials) c.bench_trials = *o.trials;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flux-adaptive finite state projection solver for the chemical master equation"};
  app.require_subcommand(1);
  Overrides o;

  auto* run = app.add_subcommand("run", "Adaptive solve; writes trajectory, summary and snapshots");
  add_common(run, o);
  add_solver(run, o);

  auto* validate = app.add_subcommand("validate", "Compare against a fixed-box reference solution");
  add_common(validate, o);
  add_solver(validate, o);
  validate->add_option("--box-lower", o.box_lower, "Per-species lower bounds")->delimiter(',');
  validate->add_option("--box-upper", o.box_upper, "Per-species upper bounds")->delimiter(',');
  validate->add_option("--box-max-states", o.box_max_states, "Reference state cap");
  validate->add_option("--reference-tol", o.reference_tol, "Reference integration tolerance");
  validate->add_option("--reference-method", o.reference_method,
                       "auto, dense, krylov or uniformization");

  auto* bench = app.add_subcommand("bench-assembly", "Time generator assembly methods");
  add_common(bench, o);
  bench->add_option("--sizes", o.sizes, "State-set sizes")->delimiter(',');
  bench->add_option("--trials", o.trials, "Repetitions per size");

  auto* models = app.add_subcommand("models", "List built-in models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*models) return cmd_models(std::cout);

  std::filesystem::path out_dir = o.output.value_or(".");
  return guarded(out_dir, std::cerr, [&] {
    const RunConfig config = build_config(o);
    out_dir = config.output_dir;
    if (o.threads) set_max_threads(*o.threads);
    if (*run) return cmd_run(config, std::cerr);
    if (*validate) return cmd_validate(config, std::cerr);
    return cmd_bench_assembly(config, std::cerr);
  });
}
