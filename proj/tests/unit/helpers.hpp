#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fluxfsp/generator.hpp"
#include "fluxfsp/network.hpp"
#include "fluxfsp/state_set.hpp"

namespace fluxfsp::testing {

/// All lattice points of a random box near either the origin or the model's
/// initial state, at most max_states of them.
inline StateSet random_box(const Model& model, std::mt19937_64& rng, std::size_t max_states = 500) {
  const std::size_t ns = model.network.num_species();
  const int width = ns == 1 ? 400 : ns == 2 ? 20 : ns == 3 ? 7 : 4;
  std::uniform_int_distribution<int> wdist(1, width);
  std::bernoulli_distribution near_origin(0.3);
  const bool origin = near_origin(rng);
  std::vector<Count> lo(ns);
  std::vector<Count> hi(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    const Count x0 = model.initial_state[s];
    std::uniform_int_distribution<Count> jitter(-std::max<Count>(x0 / 10, 3), std::max<Count>(x0 / 10, 3));
    const Count centre = origin ? 0 : std::max<Count>(0, x0 + jitter(rng));
    const int w = wdist(rng);
    lo[s] = std::max<Count>(0, centre - w / 2);
    hi[s] = lo[s] + w - 1;
  }
  StateSet out(ns);
  std::vector<Count> x = lo;
  while (out.size() < max_states) {
    out.insert(x);
    std::size_t s = 0;
    while (s < ns && ++x[s] > hi[s]) {
      x[s] = lo[s];
      ++s;
    }
    if (s == ns) break;
  }
  return out;
}

/// Dense generator built from the definition: entry (i, j) sums alpha_k(x_j)
/// over reactions with x_i = x_j + nu_k; diagonal is -w(x_j) (truncated) or
/// minus the in-set off-diagonal column sum (compressed).
inline Eigen::MatrixXd brute_force_generator(const StateSet& s, const ReactionNetwork& net,
                                             GeneratorMode mode) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto xj = s[static_cast<std::size_t>(j)];
    double w = 0.0;
    for (std::size_t k = 0; k < net.num_reactions(); ++k) w += net.propensity(k, xj);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) continue;
      const auto xi = s[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < net.num_reactions(); ++k) {
        const auto nu = net.stoichiometry(k);
        bool hit = true;
        for (std::size_t q = 0; q < xi.size(); ++q) hit = hit && xi[q] == xj[q] + nu[q];
        if (hit) a(i, j) += net.propensity(k, xj);
      }
    }
    a(j, j) = mode == GeneratorMode::Truncated ? -w : -a.col(j).sum();
  }
  return a;
}

/// Random CME-like generator with nonnegative off-diagonals; density in (0, 1].
inline Eigen::MatrixXd random_generator(std::size_t n, std::mt19937_64& rng, double density,
                                        GeneratorMode mode, double scale = 1.0) {
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Eigen::Index j = 0; j < m; ++j) {
    double leak = mode == GeneratorMode::Truncated ? scale * u(rng) : 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i != j && u(rng) < density) a(i, j) = scale * u(rng);
    }
    a(j, j) = -a.col(j).sum() - leak;
  }
  return a;
}

inline SparseGenerator to_sparse(const Eigen::MatrixXd& a, GeneratorMode mode) {
  std::vector<Triplet> t;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (a(i, j) != 0.0) t.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), a(i, j)});
    }
  }
  return SparseGenerator::from_triplets(static_cast<std::size_t>(a.rows()), mode, t);
}

inline std::vector<double> random_probability(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (double& x : p) s += (x = e(rng));
  for (double& x : p) x /= s;
  return p;
}

inline double l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

inline double sum(const std::vector<double>& a) {
  double s = 0.0;
  for (double x : a) s += x;
  return s;
}

}  // namespace fluxfsp::testing
