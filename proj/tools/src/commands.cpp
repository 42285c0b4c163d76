#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>

#include <json.hpp>

#include "fluxfsp/adaptive.hpp"
#include "fluxfsp/error.hpp"
#include "fluxfsp/reference.hpp"
#include "output.hpp"

namespace fluxfsp::cli {

namespace {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ordered_json per_species(const std::vector<std::string>& species, const std::vector<double>& v) {
  ordered_json j = ordered_json::object();
  for (std::size_t s = 0; s < species.size(); ++s) j[species[s]] = v[s];
  return j;
}

void prepare_output(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ConfigError("cannot create output directory " + dir.string());
  }
}

/// Checkpoint list with tf appended, sorted and deduplicated.
std::vector<double> checkpoints_with_tf(const SolverConfig& s) {
  std::vector<double> out = s.checkpoint_times;
  out.push_back(s.tf);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (double t : out) {
    if (t < s.t0 || t > s.tf) throw ConfigError("checkpoints must lie in [t0, tf]");
  }
  return out;
}

}  // namespace

int guarded(const std::filesystem::path& output_dir, std::ostream& err,
            const std::function<int()>& body) {
  std::string kind;
  std::string message;
  int code = kExitOk;
  try {
    return body();
  } catch (const ConfigError& e) {
    kind = "config";
    message = e.what();
    code = kExitConfig;
  } catch (const BoundViolation& e) {
    kind = "bound_violation";
    message = e.what();
    code = kExitBoundViolation;
  } catch (const SolverError& e) {
    kind = "solver";
    message = e.what();
    code = kExitSolver;
  } catch (const std::exception& e) {
    kind = "solver";
    message = e.what();
    code = kExitSolver;
  }
  ordered_json record;
  record["error"] = {{"kind", kind}, {"message", message}};
  record["exit_code"] = code;
  err << record.dump() << '\n';
  std::error_code ec;
  if (std::filesystem::is_directory(output_dir, ec)) {
    try {
      write_text(output_dir / "error.json", record.dump(2) + "\n");
    } catch (const std::exception&) {
      // The record already went to err.
    }
  }
  return code;
}

int cmd_run(const RunConfig& config, std::ostream& log) {
  config.validate();
  const Model model = resolve_model(config);
  prepare_output(config.output_dir);
  const auto& species = model.network.species();

  const auto start = Clock::now();
  const RunResult result = run(model.network, model.initial_state, config.solver);
  const double wall = seconds_since(start);

  write_trajectory_csv(config.output_dir / "trajectory.csv", species, result.trajectory.rows);
  if (config.write_snapshots) {
    for (const auto& snap : result.trajectory.snapshots) {
      write_snapshot_csv(config.output_dir / snapshot_filename(snap.t), species, snap.states,
                         snap.p);
    }
  }

  ordered_json summary;
  summary["model"] = model.name;
  summary["species"] = species;
  summary["t_final"] = config.solver.tf;
  summary["steps"] = result.trajectory.rows.size();
  summary["final_means"] = per_species(species, species_means(result.states, result.p));
  summary["final_mass"] = std::accumulate(result.p.begin(), result.p.end(), 0.0);
  summary["final_states"] = result.states.size();
  summary["peak_states"] = result.peak_states;
  summary["peak_expanded_states"] = result.peak_expanded_states;
  summary["error_bound"] = {{"model", result.ledger.model_error_bound},
                            {"stepping", result.ledger.stepping_error_bound},
                            {"total", result.ledger.global_bound()}};
  summary["pruned_mass_total"] = result.ledger.pruned_mass_total;
  summary["apriori_bound_total"] = result.ledger.apriori_bound_total;
  summary["wall_time_s"] = wall;
  write_text(config.output_dir / "summary.json", summary.dump(2) + "\n");

  log << model.name << ": " << result.trajectory.rows.size() << " steps, peak |S| "
      << result.peak_states << ", error bound " << format_double(result.ledger.global_bound())
      << ", " << format_double(wall) << " s\n";
  return kExitOk;
}

int cmd_validate(const RunConfig& config, std::ostream& log) {
  config.validate();
  if (!config.box) throw ConfigError("validate needs a box (lower/upper bounds)");
  const Model model = resolve_model(config);
  prepare_output(config.output_dir);
  const auto& species = model.network.species();

  SolverConfig solver = config.solver;
  solver.checkpoint_times = checkpoints_with_tf(solver);
  const RunResult adaptive = run(model.network, model.initial_state, solver);
  const ReferenceSolution reference =
      full_fsp_reference(model.network, model.initial_state, *config.box,
                         solver.checkpoint_times, solver.t0, config.reference);

  ordered_json out;
  out["model"] = model.name;
  out["box"] = {{"lower", config.box->lower},
                {"upper", config.box->upper},
                {"states", reference.states.size()}};
  out["checkpoints"] = ordered_json::array();
  bool all_ok = true;
  for (std::size_t c = 0; c < reference.checkpoints.size(); ++c) {
    const auto& ref = reference.checkpoints[c];
    const auto& snap = adaptive.trajectory.snapshots.at(c);
    const ComparisonMetrics m = compare(snap.states, snap.p, reference.states, ref.p);

    double model_bound = 0.0;
    double step_bound = 0.0;
    for (const auto& row : adaptive.trajectory.rows) {
      if (row.t == snap.t) {
        model_bound = row.model_error_bound;
        step_bound = row.stepping_error_bound;
      }
    }
    const double bound = model_bound + step_bound;
    // The oracle itself is off by its lost mass plus its integration tolerance.
    const double oracle_error = std::max(0.0, 1.0 - ref.retained_mass) + config.reference.tol;
    const bool ok = m.l1_distance <= bound + oracle_error;
    all_ok = all_ok && ok;

    ordered_json j;
    j["t"] = ref.t;
    j["means_adaptive"] = per_species(species, m.means_adaptive);
    j["means_reference"] = per_species(species, m.means_reference);
    j["abs_err"] = per_species(species, m.abs_err);
    j["rel_err"] = per_species(species, m.rel_err);
    j["l1_distance"] = m.l1_distance;
    j["ledger_bound"] = bound;
    j["model_error_bound"] = model_bound;
    j["stepping_error_bound"] = step_bound;
    j["reference_retained_mass"] = ref.retained_mass;
    j["oracle_error"] = oracle_error;
    j["adaptive_states"] = snap.states.size();
    j["within_bound"] = ok;
    out["checkpoints"].push_back(std::move(j));
    log << "t=" << format_double(ref.t) << " l1=" << format_double(m.l1_distance)
        << " bound=" << format_double(bound) << (ok ? "" : "  VIOLATION") << '\n';
  }
  out["all_within_bound"] = all_ok;
  write_text(config.output_dir / "validation.json", out.dump(2) + "\n");
  if (!all_ok) {
    throw BoundViolation("measured l1 error exceeds the ledger bound; see validation.json");
  }
  return kExitOk;
}

StateSet breadth_first_states(const ReactionNetwork& network, const State& x0, std::size_t n) {
  StateSet states(network.num_species());
  states.insert(x0);
  while (states.size() < n) {
    const std::size_t before = states.size();
    states = expand(std::move(states), network, 1);
    if (states.size() == before) break;
  }
  if (states.size() <= n) return states;
  std::vector<std::size_t> keep(n);
  std::iota(keep.begin(), keep.end(), std::size_t{0});
  return restrict(states, keep).states;
}

TimingStats summarize_timings(std::vector<double> seconds) {
  TimingStats s;
  if (seconds.empty()) return s;
  std::sort(seconds.begin(), seconds.end());
  const std::size_t n = seconds.size();
  s.median_s = n % 2 ? seconds[n / 2] : 0.5 * (seconds[n / 2 - 1] + seconds[n / 2]);
  s.mean_s = std::accumulate(seconds.begin(), seconds.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : seconds) ss += (x - s.mean_s) * (x - s.mean_s);
  s.stddev_s = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return s;
}

AssemblyBenchmark bench_assembly(const ReactionNetwork& network, const StateSet& states,
                                 int trials) {
  AssemblyBenchmark b;
  b.states = states.size();
  b.reactions = network.num_reactions();
  std::vector<double> forward;
  std::vector<double> all_pairs;
  SparseGenerator fa;
  SparseGenerator pa;
  for (int i = 0; i < trials; ++i) {
    AssemblyStats fs;
    auto t = Clock::now();
    fa = assemble(states, network, GeneratorMode::Compressed, &fs);
    forward.push_back(seconds_since(t));
    AssemblyStats ps;
    t = Clock::now();
    pa = assemble_all_pairs(states, network, GeneratorMode::Compressed, &ps);
    all_pairs.push_back(seconds_since(t));
    b.forward_evaluations = fs.propensity_evaluations;
    b.all_pairs_evaluations = ps.propensity_evaluations;
  }
  b.forward = summarize_timings(std::move(forward));
  b.all_pairs = summarize_timings(std::move(all_pairs));
  b.identical = fa == pa;
  return b;
}

int cmd_bench_assembly(const RunConfig& config, std::ostream& log) {
  config.validate();
  const Model model = resolve_model(config);
  prepare_output(config.output_dir);

  auto timing = [](const TimingStats& t, std::size_t evals) {
    return ordered_json{{"median_s", t.median_s},
                        {"mean_s", t.mean_s},
                        {"stddev_s", t.stddev_s},
                        {"propensity_evaluations", evals}};
  };
  ordered_json out;
  out["model"] = model.name;
  out["reactions"] = model.network.num_reactions();
  out["trials"] = config.bench_trials;
  out["results"] = ordered_json::array();
  for (std::size_t size : config.bench_sizes) {
    const StateSet states = breadth_first_states(model.network, model.initial_state, size);
    const AssemblyBenchmark b = bench_assembly(model.network, states, config.bench_trials);
    const double speedup = b.forward.median_s > 0.0 ? b.all_pairs.median_s / b.forward.median_s : 0.0;
    out["results"].push_back({{"requested_states", size},
                              {"states", b.states},
                              {"forward", timing(b.forward, b.forward_evaluations)},
                              {"all_pairs", timing(b.all_pairs, b.all_pairs_evaluations)},
                              {"speedup", speedup},
                              {"identical", b.identical}});
    log << "|S|=" << b.states << " forward " << format_double(b.forward.median_s)
        << " s, all-pairs " << format_double(b.all_pairs.median_s) << " s, speedup "
        << format_double(speedup) << '\n';
  }
  write_text(config.output_dir / "bench.json", out.dump(2) + "\n");
  return kExitOk;
}

int cmd_models(std::ostream& out) {
  for (const auto& name : builtin_model_names()) {
    const Model m = builtin_model(name);
    out << name << ": " << m.network.num_species() << " species, "
        << m.network.num_reactions() << " reactions\n";
  }
  return kExitOk;
}

}  // namespace fluxfsp::cli
