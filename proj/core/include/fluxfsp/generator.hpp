#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fluxfsp/network.hpp"
#include "fluxfsp/state_set.hpp"

namespace fluxfsp {

enum class GeneratorMode {
  /// Principal submatrix A_JJ: diagonal is the full exit rate -w(x), so mass
  /// leaving the set is lost.
  Truncated,
  /// A_JJ with the out-of-set exit rate added back to the diagonal, making
  /// every column sum zero.
  Compressed,
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// CME generator in compressed sparse column form (column j = source state j).
/// Row indices are sorted and unique within each column.
class SparseGenerator {
 public:
  SparseGenerator() = default;

  /// Sums duplicate (row, col) pairs and drops exact zeros.
  static SparseGenerator from_triplets(std::size_t n, GeneratorMode mode,
                                       std::span<const Triplet> triplets);

  std::size_t dim() const noexcept { return n_; }
  GeneratorMode mode() const noexcept { return mode_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  std::span<const std::size_t> col_ptr() const noexcept { return col_ptr_; }
  std::span<const std::size_t> row_index() const noexcept { return row_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  double coeff(std::size_t row, std::size_t col) const;
  double column_sum(std::size_t col) const;
  double column_abs_max(std::size_t col) const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// Induced 1-norm (max absolute column sum).
  double norm1() const;

  Eigen::MatrixXd to_dense() const;

  friend bool operator==(const SparseGenerator&, const SparseGenerator&) = default;

 private:
  friend class GeneratorBuilder;

  std::size_t n_ = 0;
  GeneratorMode mode_ = GeneratorMode::Compressed;
  std::vector<std::size_t> col_ptr_{0};
  std::vector<std::size_t> row_idx_;
  std::vector<double> values_;
};

/// Full exit rate w(x) = sum_k alpha_k(x) per state, including reactions that
/// leave the set. Never derived from a Compressed diagonal.
using ExitRates = std::vector<double>;

ExitRates exit_rates(const StateSet& states, const ReactionNetwork& network);

struct AssemblyStats {
  std::size_t propensity_evaluations = 0;
};

/// Forward enumeration: for every state x (column j) and reaction k evaluate
/// alpha_k(x) once; when it is positive and x + nu_k is in the set, write it
/// at (index(x + nu_k), j). Exactly |S| * R propensity evaluations.
SparseGenerator assemble(const StateSet& states, const ReactionNetwork& network,
                         GeneratorMode mode, AssemblyStats* stats = nullptr);

/// Naive baseline: every (destination, source) pair is tested against every
/// stoichiometry vector. O(|S|^2 R); kept for benchmarking.
SparseGenerator assemble_all_pairs(const StateSet& states, const ReactionNetwork& network,
                                   GeneratorMode mode, AssemblyStats* stats = nullptr);

/// Restriction of A to the kept indices (sorted, as produced by restrict());
/// equals assemble(new_states, network, A.mode()).
SparseGenerator restrict_generator(const SparseGenerator& a, std::span<const std::size_t> keep,
                                   const StateSet& new_states, const ReactionNetwork& network);

/// MatrixMarket coordinate dump (1-based indices), for external cross-checks.
void write_matrix_market(std::ostream& out, const SparseGenerator& a);

}  // namespace fluxfsp
