#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fluxfsp/expmv.hpp"
#include "fluxfsp/generator.hpp"
#include "fluxfsp/network.hpp"
#include "fluxfsp/state_set.hpp"

namespace fluxfsp {

/// Non-negative probability masses aligned to a StateSet.
using ProbabilityVector = std::vector<double>;

struct FluxDiagnostics {
  /// p(x) w(x) per state, 1/s.
  std::vector<double> per_state_flux;
  double total = 0.0;
  double max = 0.0;
  std::size_t argmax = 0;
  /// Rate at which mass leaves the set: sum of alpha_k(x) p(x) over firings
  /// whose destination is outside it.
  double boundary_outflux = 0.0;
};

FluxDiagnostics flux_diagnostics(std::span<const double> p, std::span<const double> w,
                                 const StateSet& states, const ReactionNetwork& network);

double boundary_outflux(std::span<const double> p, const StateSet& states,
                        const ReactionNetwork& network);

struct SolverConfig {
  /// alpha: probability mass eligible for removal per prune, in (0, 1).
  double quantile_tol = 0.01;
  /// epsilon_flux: candidates with flux >= flux_tol * total flux are kept.
  /// Zero disables protection (probability-only pruning).
  double flux_tol = 1e-6;
  /// epsilon_dt: the step is dt_tol / max state flux.
  double dt_tol = 0.1;
  /// Per-step l1 tolerance of the matrix exponential action.
  double ode_tol = 1e-10;
  /// Step clamps; default to 1e-12 (tf - t0) and tf - t0.
  std::optional<double> dt_min;
  std::optional<double> dt_max;
  int expansion_radius = 1;
  double t0 = 0.0;
  double tf = 1.0;
  int prune_every = 1;
  std::vector<double> checkpoint_times;
  int max_krylov_dim = 30;

  /// Throws ConfigError when any field is out of range.
  void validate() const;
  double min_step() const { return dt_min.value_or(1e-12 * (tf - t0)); }
  double max_step() const { return dt_max.value_or(tf - t0); }
};

/// clamp(dt_tol / max flux, dt_min, dt_max); dt_max when the max flux is zero.
double flux_step(const FluxDiagnostics& diag, const SolverConfig& cfg);

/// flux_step() shortened so that t + dt does not pass the next checkpoint or tf.
double adaptive_dt(const FluxDiagnostics& diag, const SolverConfig& cfg, double t);

struct PruneReport {
  std::size_t candidate_count = 0;
  std::size_t protected_count = 0;
  std::size_t removed_count = 0;
  /// Mass removed before renormalisation.
  double removed_mass = 0.0;
  /// Largest exit rate among removed states (0 if none).
  double w_max = 0.0;
  double flux_threshold = 0.0;
  /// Sorted indices (into the input set) of surviving states.
  std::vector<std::size_t> kept;
};

struct PruneResult {
  StateSet states;
  ProbabilityVector p;
  PruneReport report;
};

/// Quantile candidate selection, flux protection, then removal and
/// renormalisation. The most probable state is never removed.
PruneResult prune(const StateSet& states, std::span<const double> p, std::span<const double> w,
                  const SolverConfig& cfg);

struct LedgerStep {
  double t = 0.0;
  double dt = 0.0;
  /// Local model error: 2 * boundary outflux * dt plus the l1 effect of pruning.
  double model_error = 0.0;
  /// Local time-stepping error (expmv tolerance plus clamped mass).
  double stepping_error = 0.0;
  /// (flux_tol * total flux + quantile_tol * w_max) * dt.
  double apriori_bound = 0.0;
};

struct ErrorLedger {
  double model_error_bound = 0.0;
  double stepping_error_bound = 0.0;
  double pruned_mass_total = 0.0;
  double apriori_bound_total = 0.0;
  std::vector<LedgerStep> steps;

  double global_bound() const { return model_error_bound + stepping_error_bound; }
};

/// Adds one step. The outflux rate used is the larger of diag.boundary_outflux
/// (start of step) and end_outflux (after evolution). Mass that should have
/// left is both missing outside the set and surplus inside it, so the
/// full-space charge is twice outflux * dt; removing mass m and renormalising
/// likewise moves the vector by exactly 2m. The stepping term is ode_tol plus
/// any mass clamped away from negative entries.
ErrorLedger error_update(const ErrorLedger& ledger, const FluxDiagnostics& diag, double dt,
                         const PruneReport& report, const SolverConfig& cfg, double t_end,
                         double end_outflux = 0.0, double clamped_mass = 0.0);

/// Per-step details kept for trajectory output and observers.
struct StepInfo {
  double t = 0.0;
  double dt = 0.0;
  std::size_t expanded_states = 0;
  double phi_total = 0.0;
  double phi_max = 0.0;
  double phi_out_start = 0.0;
  double phi_out_end = 0.0;
  bool pruned = false;
  PruneReport prune;
  ExpmvResult expmv_stats;  // w is left empty
};

struct SolverState {
  double t = 0.0;
  StateSet states;
  ProbabilityVector p;
  /// Generator of the last step restricted to the surviving states.
  SparseGenerator generator;
  ErrorLedger ledger;
  std::size_t steps_taken = 0;
};

SolverState initial_state(const ReactionNetwork& network, const State& x0, const SolverConfig& cfg);

/// Expand, assemble, pick dt from the flux, evolve, prune, update the ledger.
SolverState step(const ReactionNetwork& network, SolverState state, const SolverConfig& cfg,
                 StepInfo* info = nullptr);

struct TrajectoryRow {
  double t = 0.0;
  double dt = 0.0;
  std::size_t n_states = 0;
  double phi_total = 0.0;
  double phi_max = 0.0;
  double phi_out = 0.0;
  double model_error_bound = 0.0;
  double stepping_error_bound = 0.0;
  std::vector<double> means;
};

struct Snapshot {
  double t = 0.0;
  StateSet states;
  ProbabilityVector p;
};

struct TrajectoryRecord {
  std::vector<TrajectoryRow> rows;
  std::vector<Snapshot> snapshots;
};

struct RunResult {
  StateSet states;
  ProbabilityVector p;
  ErrorLedger ledger;
  TrajectoryRecord trajectory;
  /// Largest active set after pruning.
  std::size_t peak_states = 0;
  /// Largest expanded set the generator was assembled on.
  std::size_t peak_expanded_states = 0;
};

using StepObserver = std::function<void(const SolverState&, const StepInfo&)>;

/// Steps from cfg.t0 to cfg.tf, recording every step and a snapshot at each
/// checkpoint. Deterministic for identical inputs.
RunResult run(const ReactionNetwork& network, const State& x0, const SolverConfig& cfg,
              const StepObserver& observer = {});

std::vector<double> species_means(const StateSet& states, std::span<const double> p);

}  // namespace fluxfsp
