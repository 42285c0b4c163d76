#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fluxfsp/generator.hpp"

namespace fluxfsp {

struct ExpmvOptions {
  /// Requested l1 accuracy relative to ||v||_1 over the whole interval.
  double tol = 1e-10;
  /// Krylov subspace dimension m (capped at the problem dimension).
  int max_krylov_dim = 30;
  /// Internal time substeps allowed before giving up.
  int max_substeps = 1'000'000;
  /// Clamp negative output entries to zero (reported in clamped_mass).
  bool clamp_negative = true;
};

struct ExpmvResult {
  std::vector<double> w;
  /// Sum of |negative entries| removed by clamping.
  double clamped_mass = 0.0;
  /// Accumulated a-posteriori l1 error estimate.
  double error_estimate = 0.0;
  int substeps = 0;
  int rejected = 0;
  std::size_t matvecs = 0;
};

/// w ~= exp(t A) v by Arnoldi projection with Expokit-style step control:
/// each substep's estimated l1 error is held below tol * ||v||_1 * (dt / t).
/// Throws SolverError if max_substeps is exceeded or values go non-finite,
/// ConfigError on dimension mismatch or t < 0.
ExpmvResult expmv(const SparseGenerator& a, std::span<const double> v, double t,
                  const ExpmvOptions& opts = {});

inline constexpr std::size_t kDenseExpmMaxDim = 2000;

/// exp(t A) by scaling and squaring with a degree-13 (or lower) Pade
/// approximant. Throws ConfigError for non-square input or n > kDenseExpmMaxDim.
Eigen::MatrixXd expm_dense(const Eigen::MatrixXd& a, double t = 1.0);

}  // namespace fluxfsp
