#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fluxfsp/adaptive.hpp"
#include "fluxfsp/network.hpp"
#include "fluxfsp/state_set.hpp"

namespace fluxfsp {

/// Inclusive per-species bounds of a fixed truncation box.
struct BoxSpec {
  std::vector<Count> lower;
  std::vector<Count> upper;
  /// Upper limit on enumerated states.
  std::size_t max_states = 1'000'000;

  bool contains(std::span<const Count> x) const;
  /// Throws ConfigError on malformed bounds.
  void validate(std::size_t num_species) const;
};

/// Every box state reachable from x0 by firings that stay inside the box, in
/// breadth-first order (x0 first). Throws ConfigError if x0 lies outside the
/// box or the count exceeds box.max_states.
StateSet enumerate_box(const ReactionNetwork& network, const State& x0, const BoxSpec& box);

enum class ReferenceMethod {
  /// Dense Pade when n <= kDenseExpmMaxDim; otherwise uniformization when the
  /// interval is long relative to the fastest rate, Krylov when it is not.
  Auto,
  Dense,
  Krylov,
  Uniformization,
};

struct ReferenceOptions {
  /// l1 accuracy per checkpoint interval.
  double tol = 1e-12;
  ReferenceMethod method = ReferenceMethod::Auto;
  int max_krylov_dim = 30;
};

struct ReferenceCheckpoint {
  double t = 0.0;
  ProbabilityVector p;
  /// 1^T p; the remainder has left the box.
  double retained_mass = 1.0;
};

struct ReferenceSolution {
  StateSet states;
  std::vector<ReferenceCheckpoint> checkpoints;
};

/// Classical FSP on a fixed box: the Truncated generator over the reachable
/// box states is assembled once and the initial point mass is carried through
/// the checkpoints (sorted ascending, all >= t0).
ReferenceSolution full_fsp_reference(const ReactionNetwork& network, const State& x0,
                                     const BoxSpec& box, std::span<const double> checkpoints,
                                     double t0 = 0.0, const ReferenceOptions& opts = {});

/// p(t) = exp(t A) p0 by uniformization, for A with non-negative off-diagonals
/// and non-positive column sums. Poisson weights outside the window holding
/// all but tol of the mass are dropped, so the result never overshoots.
std::vector<double> uniformization(const SparseGenerator& a, std::span<const double> p0, double t,
                                   double tol);

struct ComparisonMetrics {
  std::vector<double> means_adaptive;
  std::vector<double> means_reference;
  std::vector<double> abs_err;
  /// abs_err / max(|reference mean|, 1e-30)
  std::vector<double> rel_err;
  /// Sum over the union of both supports, missing states counted as zero.
  double l1_distance = 0.0;
};

/// Throws ConfigError when the species counts differ or vectors misalign.
ComparisonMetrics compare(const StateSet& adaptive_states, std::span<const double> adaptive_p,
                          const StateSet& reference_states, std::span<const double> reference_p);

}  // namespace fluxfsp
