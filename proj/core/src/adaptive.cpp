#include "fluxfsp/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>

#include "fluxfsp/error.hpp"

namespace fluxfsp {

namespace {

double time_eps(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

/// Smallest checkpoint strictly after t, or tf.
double next_stop(double t, const SolverConfig& cfg) {
  double stop = cfg.tf;
  for (double c : cfg.checkpoint_times) {
    if (c > t + time_eps(t) && c < stop) stop = c;
  }
  return stop;
}

bool is_checkpoint(double t, const SolverConfig& cfg) {
  return std::any_of(cfg.checkpoint_times.begin(), cfg.checkpoint_times.end(),
                     [&](double c) { return std::abs(c - t) <= time_eps(t); });
}

}  // namespace

void SolverConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("solver config: " + msg); };
  if (!(quantile_tol > 0.0 && quantile_tol < 1.0)) fail("quantile_tol must lie in (0, 1)");
  if (!(flux_tol >= 0.0)) fail("flux_tol must be >= 0");
  if (!(dt_tol > 0.0)) fail("dt_tol must be > 0");
  if (!(ode_tol > 0.0)) fail("ode_tol must be > 0");
  if (!std::isfinite(t0) || !std::isfinite(tf) || !(t0 < tf)) fail("need finite t0 < tf");
  if (!(min_step() > 0.0)) fail("dt_min must be > 0");
  if (!(min_step() <= max_step())) fail("dt_min must not exceed dt_max");
  if (expansion_radius < 1) fail("expansion_radius must be >= 1");
  if (prune_every < 1) fail("prune_every must be >= 1");
  if (max_krylov_dim < 1) fail("max_krylov_dim must be >= 1");
  for (double c : checkpoint_times) {
    if (!std::isfinite(c)) fail("checkpoint times must be finite");
  }
}

double boundary_outflux(std::span<const double> p, const StateSet& states,
                        const ReactionNetwork& network) {
  if (p.size() != states.size()) throw ConfigError("probability vector does not match state set");
  double out = 0.0;
  std::vector<Count> y;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (p[i] == 0.0) continue;
    const auto x = states[i];
    for (std::size_t k = 0; k < network.num_reactions(); ++k) {
      const double alpha = network.propensity(k, x);
      if (!(alpha > 0.0)) continue;
      if (!apply_into(x, network.stoichiometry(k), y) || !states.contains(y)) {
        out += alpha * p[i];
      }
    }
  }
  return out;
}

FluxDiagnostics flux_diagnostics(std::span<const double> p, std::span<const double> w,
                                 const StateSet& states, const ReactionNetwork& network) {
  if (p.size() != w.size() || p.size() != states.size()) {
    throw ConfigError("flux_diagnostics: misaligned dimensions");
  }
  FluxDiagnostics d;
  d.per_state_flux.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double phi = p[i] * w[i];
    d.per_state_flux[i] = phi;
    d.total += phi;
    if (phi > d.max) {
      d.max = phi;
      d.argmax = i;
    }
  }
  d.boundary_outflux = boundary_outflux(p, states, network);
  return d;
}

double flux_step(const FluxDiagnostics& diag, const SolverConfig& cfg) {
  if (!(diag.max > 0.0)) return cfg.max_step();
  return std::clamp(cfg.dt_tol / diag.max, cfg.min_step(), cfg.max_step());
}

double adaptive_dt(const FluxDiagnostics& diag, const SolverConfig& cfg, double t) {
  const double dt = flux_step(diag, cfg);
  const double stop = next_stop(t, cfg);
  return t + dt >= stop - time_eps(stop) ? stop - t : dt;
}

PruneResult prune(const StateSet& states, std::span<const double> p, std::span<const double> w,
                  const SolverConfig& cfg) {
  const std::size_t n = states.size();
  if (p.size() != n || w.size() != n) throw ConfigError("prune: misaligned dimensions");
  if (n == 0) throw ConfigError("prune: empty state set");
  const double mass = std::accumulate(p.begin(), p.end(), 0.0);
  if (!(mass > 0.0)) throw SolverError("prune: probability vector has no mass");

  // Stage 1: ascending probability, ties by index; the candidate set is the
  // longest prefix whose mass does not exceed quantile_tol.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::size_t n_candidates = 0;
  double prefix_mass = 0.0;
  while (n_candidates < n && prefix_mass + p[order[n_candidates]] <= cfg.quantile_tol) {
    prefix_mass += p[order[n_candidates++]];
  }
  const std::size_t most_probable = order.back();

  // Stage 2: protect candidates carrying at least flux_tol of the total flux.
  double phi_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) phi_total += p[i] * w[i];
  PruneReport report;
  report.candidate_count = n_candidates;
  report.flux_threshold = cfg.flux_tol * phi_total;
  const bool protection = cfg.flux_tol > 0.0;

  std::vector<char> remove(n, 0);
  for (std::size_t c = 0; c < n_candidates; ++c) {
    const std::size_t i = order[c];
    if (i == most_probable) continue;
    if (protection && p[i] * w[i] >= report.flux_threshold) {
      ++report.protected_count;
      continue;
    }
    remove[i] = 1;
    ++report.removed_count;
    report.removed_mass += p[i];
    report.w_max = std::max(report.w_max, w[i]);
  }

  // Stage 3: restrict and renormalise.
  report.kept.reserve(n - report.removed_count);
  for (std::size_t i = 0; i < n; ++i) {
    if (!remove[i]) report.kept.push_back(i);
  }
  if (report.kept.empty()) throw SolverError("prune: every state would be removed");
  auto restricted = restrict(states, report.kept);
  ProbabilityVector q(report.kept.size());
  double kept_mass = 0.0;
  for (std::size_t r = 0; r < q.size(); ++r) {
    q[r] = p[report.kept[r]];
    kept_mass += q[r];
  }
  if (!(kept_mass > 0.0)) throw SolverError("prune: surviving states carry no mass");
  for (double& x : q) x /= kept_mass;
  return {std::move(restricted.states), std::move(q), std::move(report)};
}

ErrorLedger error_update(const ErrorLedger& ledger, const FluxDiagnostics& diag, double dt,
                         const PruneReport& report, const SolverConfig& cfg, double t_end,
                         double end_outflux, double clamped_mass) {
  ErrorLedger out = ledger;
  LedgerStep s;
  s.t = t_end;
  s.dt = dt;
  // The inflow term is identically zero: the computed solution has no mass
  // outside the active set.
  s.model_error = 2.0 * (std::max(diag.boundary_outflux, end_outflux) * dt + report.removed_mass);
  s.stepping_error = cfg.ode_tol + clamped_mass;
  s.apriori_bound = (cfg.flux_tol * diag.total + cfg.quantile_tol * report.w_max) * dt;
  out.model_error_bound += s.model_error;
  out.stepping_error_bound += s.stepping_error;
  out.pruned_mass_total += report.removed_mass;
  out.apriori_bound_total += s.apriori_bound;
  out.steps.push_back(s);
  return out;
}

SolverState initial_state(const ReactionNetwork& network, const State& x0, const SolverConfig& cfg) {
  cfg.validate();
  if (x0.size() != network.num_species()) {
    throw ConfigError("initial state dimension does not match network");
  }
  SolverState s;
  s.t = cfg.t0;
  s.states = StateSet(network.num_species());
  s.states.insert(x0);
  s.p = {1.0};
  s.generator = assemble(s.states, network, GeneratorMode::Compressed);
  return s;
}

SolverState step(const ReactionNetwork& network, SolverState state, const SolverConfig& cfg,
                 StepInfo* info) {
  if (!(state.t < cfg.tf)) throw ConfigError("step: already at the final time");

  StateSet expanded = expand(std::move(state.states), network, cfg.expansion_radius);
  const SparseGenerator a = assemble(expanded, network, GeneratorMode::Compressed);
  const ExitRates w = exit_rates(expanded, network);
  state.p.resize(expanded.size(), 0.0);

  const FluxDiagnostics diag = flux_diagnostics(state.p, w, expanded, network);
  const double dt = adaptive_dt(diag, cfg, state.t);

  ExpmvOptions opts;
  opts.tol = cfg.ode_tol;
  opts.max_krylov_dim = cfg.max_krylov_dim;
  ExpmvResult evolved = expmv(a, state.p, dt, opts);
  ProbabilityVector p = std::move(evolved.w);
  for (double x : p) {
    if (!std::isfinite(x)) {
      std::ostringstream msg;
      msg << "non-finite probability after step " << state.steps_taken << " at t=" << state.t
          << " (dt=" << dt << ", |S|=" << expanded.size() << ")";
      throw SolverError(msg.str());
    }
  }
  const double end_outflux = boundary_outflux(p, expanded, network);

  double t_next = state.t + dt;
  const double stop = next_stop(state.t, cfg);
  if (std::abs(t_next - stop) <= time_eps(stop)) t_next = stop;

  const bool do_prune = (state.steps_taken + 1) % static_cast<std::size_t>(cfg.prune_every) == 0;
  PruneReport report;
  if (do_prune) {
    PruneResult pruned = prune(expanded, p, w, cfg);
    state.generator = restrict_generator(a, pruned.report.kept, pruned.states, network);
    state.states = std::move(pruned.states);
    state.p = std::move(pruned.p);
    report = std::move(pruned.report);
  } else {
    state.generator = a;
    state.states = std::move(expanded);
    state.p = std::move(p);
    report.kept.resize(state.states.size());
    std::iota(report.kept.begin(), report.kept.end(), std::size_t{0});
  }

  state.ledger = error_update(state.ledger, diag, dt, report, cfg, t_next, end_outflux,
                              evolved.clamped_mass);
  state.t = t_next;
  ++state.steps_taken;

  if (info) {
    info->t = t_next;
    info->dt = dt;
    info->expanded_states = w.size();
    info->phi_total = diag.total;
    info->phi_max = diag.max;
    info->phi_out_start = diag.boundary_outflux;
    info->phi_out_end = end_outflux;
    info->pruned = do_prune;
    info->prune = std::move(report);
    info->expmv_stats = std::move(evolved);
  }
  return state;
}

std::vector<double> species_means(const StateSet& states, std::span<const double> p) {
  std::vector<double> means(states.num_species(), 0.0);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (p[i] == 0.0) continue;
    const auto x = states[i];
    for (std::size_t s = 0; s < means.size(); ++s) means[s] += p[i] * x[s];
  }
  return means;
}

RunResult run(const ReactionNetwork& network, const State& x0, const SolverConfig& cfg,
              const StepObserver& observer) {
  SolverState state = initial_state(network, x0, cfg);
  RunResult result;
  result.peak_states = state.states.size();
  if (is_checkpoint(state.t, cfg)) {
    result.trajectory.snapshots.push_back({state.t, state.states, state.p});
  }
  StepInfo info;
  while (state.t < cfg.tf) {
    state = step(network, std::move(state), cfg, &info);
    result.peak_states = std::max(result.peak_states, state.states.size());
    result.peak_expanded_states = std::max(result.peak_expanded_states, info.expanded_states);

    TrajectoryRow row;
    row.t = state.t;
    row.dt = info.dt;
    row.n_states = state.states.size();
    row.phi_total = info.phi_total;
    row.phi_max = info.phi_max;
    row.phi_out = std::max(info.phi_out_start, info.phi_out_end);
    row.model_error_bound = state.ledger.model_error_bound;
    row.stepping_error_bound = state.ledger.stepping_error_bound;
    row.means = species_means(state.states, state.p);
    result.trajectory.rows.push_back(std::move(row));

    if (is_checkpoint(state.t, cfg)) {
      result.trajectory.snapshots.push_back({state.t, state.states, state.p});
    }
    if (observer) observer(state, info);
  }
  result.states = std::move(state.states);
  result.p = std::move(state.p);
  result.ledger = std::move(state.ledger);
  return result;
}

}  // namespace fluxfsp
