#include "fluxfsp/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fluxfsp/error.hpp"
#include "fluxfsp/expmv.hpp"
#include "fluxfsp/generator.hpp"

namespace fluxfsp {

bool BoxSpec::contains(std::span<const Count> x) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t s = 0; s < x.size(); ++s) {
    if (x[s] < lower[s] || x[s] > upper[s]) return false;
  }
  return true;
}

void BoxSpec::validate(std::size_t num_species) const {
  if (lower.size() != num_species || upper.size() != num_species) {
    throw ConfigError("box bounds must have one entry per species");
  }
  for (std::size_t s = 0; s < num_species; ++s) {
    if (lower[s] < 0) throw ConfigError("box lower bound is negative");
    if (lower[s] > upper[s]) throw ConfigError("box lower bound exceeds upper bound");
  }
  if (max_states == 0) throw ConfigError("box max_states must be positive");
}

StateSet enumerate_box(const ReactionNetwork& network, const State& x0, const BoxSpec& box) {
  box.validate(network.num_species());
  if (!box.contains(x0.counts())) throw ConfigError("initial state lies outside the box");
  StateSet states(network.num_species());
  states.insert(x0);
  std::vector<Count> y;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t k = 0; k < network.num_reactions(); ++k) {
      // Copy: insert() may reallocate the storage states[i] points into.
      const State x = states.state(i);
      if (!(network.propensity(k, x.counts()) > 0.0)) continue;
      if (!apply_into(x.counts(), network.stoichiometry(k), y) || !box.contains(y)) continue;
      if (states.insert(y).second && states.size() > box.max_states) {
        throw ConfigError("box holds more than " + std::to_string(box.max_states) +
                          " reachable states");
      }
    }
  }
  return states;
}

std::vector<double> uniformization(const SparseGenerator& a, std::span<const double> p0, double t,
                                   double tol) {
  const std::size_t n = a.dim();
  if (p0.size() != n) throw ConfigError("uniformization: vector dimension does not match matrix");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("uniformization: t must be >= 0");
  if (!(tol > 0.0 && tol < 1.0)) throw ConfigError("uniformization: tol must lie in (0, 1)");

  double lambda = 0.0;
  for (std::size_t j = 0; j < n; ++j) lambda = std::max(lambda, -a.coeff(j, j));
  std::vector<double> v(p0.begin(), p0.end());
  if (t == 0.0 || lambda == 0.0) return v;
  const double big = lambda * t;

  // Poisson(big) weights relative to the mode, truncated where the remaining
  // tail is far below tol, then normalised over the window.
  const auto mode = static_cast<std::size_t>(std::floor(big));
  const double cutoff = 1e-2 * tol / (1.0 + std::sqrt(big));
  std::vector<double> left{1.0};
  for (std::size_t k = mode; k > 0 && left.back() > cutoff; --k) {
    left.push_back(left.back() * static_cast<double>(k) / big);
  }
  std::vector<double> right{1.0};
  for (std::size_t k = mode + 1; right.back() > cutoff; ++k) {
    right.push_back(right.back() * big / static_cast<double>(k));
  }
  const std::size_t lo = mode - (left.size() - 1);
  std::vector<double> weight(left.rbegin(), left.rend());
  weight.insert(weight.end(), right.begin() + 1, right.end());
  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
  for (double& x : weight) x /= total;

  std::vector<double> out(n, 0.0);
  std::vector<double> av(n);
  const std::size_t hi = lo + weight.size();
  for (std::size_t k = 0; k < hi; ++k) {
    if (k >= lo) {
      const double c = weight[k - lo];
      for (std::size_t i = 0; i < n; ++i) out[i] += c * v[i];
    }
    if (k + 1 == hi) break;
    a.multiply(v, av);
    for (std::size_t i = 0; i < n; ++i) v[i] += av[i] / lambda;
  }
  return out;
}

namespace {

std::vector<double> evolve(const SparseGenerator& a, const std::vector<double>& p, double dt,
                           const ReferenceOptions& opts) {
  if (dt == 0.0) return p;
  ReferenceMethod method = opts.method;
  if (method == ReferenceMethod::Auto) {
    if (a.dim() <= kDenseExpmMaxDim) {
      method = ReferenceMethod::Dense;
    } else {
      // Krylov substeps scale with ||A|| dt as well, but each costs m + 1
      // products plus orthogonalisation, so long intervals favour
      // uniformization's single product per Poisson term.
      method = a.norm1() * dt > 50.0 ? ReferenceMethod::Uniformization : ReferenceMethod::Krylov;
    }
  }
  switch (method) {
    case ReferenceMethod::Dense: {
      const Eigen::Map<const Eigen::VectorXd> v(p.data(), static_cast<Eigen::Index>(p.size()));
      const Eigen::VectorXd w = expm_dense(a.to_dense(), dt) * v;
      std::vector<double> out(w.data(), w.data() + w.size());
      for (double& x : out) x = std::max(x, 0.0);
      return out;
    }
    case ReferenceMethod::Uniformization:
      return uniformization(a, p, dt, opts.tol);
    default: {
      ExpmvOptions e;
      e.tol = opts.tol;
      e.max_krylov_dim = opts.max_krylov_dim;
      return expmv(a, p, dt, e).w;
    }
  }
}

}  // namespace

ReferenceSolution full_fsp_reference(const ReactionNetwork& network, const State& x0,
                                     const BoxSpec& box, std::span<const double> checkpoints,
                                     double t0, const ReferenceOptions& opts) {
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (!std::isfinite(checkpoints[i]) || checkpoints[i] < t0 ||
        (i > 0 && checkpoints[i] < checkpoints[i - 1])) {
      throw ConfigError("reference checkpoints must be finite, sorted and >= t0");
    }
  }
  ReferenceSolution sol;
  sol.states = enumerate_box(network, x0, box);
  const SparseGenerator a = assemble(sol.states, network, GeneratorMode::Truncated);
  std::vector<double> p(sol.states.size(), 0.0);
  p[0] = 1.0;
  double t = t0;
  for (double tc : checkpoints) {
    p = evolve(a, p, tc - t, opts);
    t = tc;
    ReferenceCheckpoint c;
    c.t = tc;
    c.retained_mass = std::accumulate(p.begin(), p.end(), 0.0);
    c.p = p;
    sol.checkpoints.push_back(std::move(c));
  }
  return sol;
}

ComparisonMetrics compare(const StateSet& adaptive_states, std::span<const double> adaptive_p,
                          const StateSet& reference_states, std::span<const double> reference_p) {
  if (adaptive_states.num_species() != reference_states.num_species()) {
    throw ConfigError("compare: species counts differ");
  }
  if (adaptive_p.size() != adaptive_states.size() ||
      reference_p.size() != reference_states.size()) {
    throw ConfigError("compare: probability vector does not match its state set");
  }
  ComparisonMetrics m;
  m.means_adaptive = species_means(adaptive_states, adaptive_p);
  m.means_reference = species_means(reference_states, reference_p);
  for (std::size_t s = 0; s < m.means_reference.size(); ++s) {
    const double abs_err = std::abs(m.means_adaptive[s] - m.means_reference[s]);
    m.abs_err.push_back(abs_err);
    m.rel_err.push_back(abs_err / std::max(std::abs(m.means_reference[s]), 1e-30));
  }
  for (std::size_t i = 0; i < reference_states.size(); ++i) {
    const auto j = adaptive_states.find(reference_states[i]);
    m.l1_distance += std::abs((j ? adaptive_p[*j] : 0.0) - reference_p[i]);
  }
  for (std::size_t j = 0; j < adaptive_states.size(); ++j) {
    if (!reference_states.contains(adaptive_states[j])) m.l1_distance += std::abs(adaptive_p[j]);
  }
  return m;
}

}  // namespace fluxfsp
