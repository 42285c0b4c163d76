#include "fluxfsp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "fluxfsp/error.hpp"
#include "fluxfsp/parallel.hpp"

namespace fluxfsp {

namespace {

struct Entry {
  std::size_t row;
  double value;
};

/// Column-at-a-time CSC writer. Off-diagonal entries are sorted by row and
/// duplicates summed; the diagonal is then placed according to the mode.
class ColumnBuffer {
 public:
  void begin_column() { entries_.clear(); }
  void add(std::size_t row, double value) { entries_.push_back({row, value}); }

  /// Finishes column j. For Truncated mode `full_exit_rate` becomes the
  /// negated diagonal; Compressed mode uses the in-set off-diagonal sum.
  void finish_column(std::size_t j, GeneratorMode mode, double full_exit_rate) {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.row < b.row; });
    merged_.clear();
    for (const auto& e : entries_) {
      if (!merged_.empty() && merged_.back().row == e.row) {
        merged_.back().value += e.value;
      } else {
        merged_.push_back(e);
      }
    }
    double col_sum = 0.0;
    for (const auto& e : merged_) col_sum += e.value;
    const double diag = mode == GeneratorMode::Compressed ? -col_sum : -full_exit_rate;
    bool placed = !(diag < 0.0);
    std::size_t count = 0;
    for (const auto& e : merged_) {
      if (!placed && e.row > j) {
        rows.push_back(j);
        vals.push_back(diag);
        placed = true;
        ++count;
      }
      rows.push_back(e.row);
      vals.push_back(e.value);
      ++count;
    }
    if (!placed) {
      rows.push_back(j);
      vals.push_back(diag);
      ++count;
    }
    col_counts.push_back(count);
  }

  std::vector<std::size_t> rows;
  std::vector<double> vals;
  std::vector<std::size_t> col_counts;

 private:
  std::vector<Entry> entries_;
  std::vector<Entry> merged_;
};

}  // namespace

/// Assembles a SparseGenerator from per-chunk column buffers, in chunk order.
class GeneratorBuilder {
 public:
  static SparseGenerator build(std::size_t n, GeneratorMode mode,
                               std::vector<ColumnBuffer>& chunks) {
    SparseGenerator a;
    a.n_ = n;
    a.mode_ = mode;
    std::size_t nnz = 0;
    for (const auto& c : chunks) nnz += c.rows.size();
    a.col_ptr_.reserve(n + 1);
    a.row_idx_.reserve(nnz);
    a.values_.reserve(nnz);
    for (auto& c : chunks) {
      for (std::size_t cnt : c.col_counts) a.col_ptr_.push_back(a.col_ptr_.back() + cnt);
      a.row_idx_.insert(a.row_idx_.end(), c.rows.begin(), c.rows.end());
      a.values_.insert(a.values_.end(), c.vals.begin(), c.vals.end());
    }
    return a;
  }

  static SparseGenerator from_triplets(std::size_t n, GeneratorMode mode,
                                       std::span<const Triplet> triplets) {
    std::vector<Triplet> t(triplets.begin(), triplets.end());
    for (const auto& e : t) {
      if (e.row >= n || e.col >= n) throw ConfigError("triplet index out of range");
    }
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
      return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    SparseGenerator a;
    a.n_ = n;
    a.mode_ = mode;
    a.col_ptr_.assign(n + 1, 0);
    for (std::size_t i = 0; i < t.size();) {
      std::size_t j = i;
      double v = 0.0;
      while (j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col) v += t[j++].value;
      if (v != 0.0) {
        a.row_idx_.push_back(t[i].row);
        a.values_.push_back(v);
        ++a.col_ptr_[t[i].col + 1];
      }
      i = j;
    }
    for (std::size_t c = 0; c < n; ++c) a.col_ptr_[c + 1] += a.col_ptr_[c];
    return a;
  }
};

SparseGenerator SparseGenerator::from_triplets(std::size_t n, GeneratorMode mode,
                                               std::span<const Triplet> triplets) {
  return GeneratorBuilder::from_triplets(n, mode, triplets);
}

double SparseGenerator::coeff(std::size_t row, std::size_t col) const {
  const auto first = row_idx_.begin() + static_cast<std::ptrdiff_t>(col_ptr_[col]);
  const auto last = row_idx_.begin() + static_cast<std::ptrdiff_t>(col_ptr_[col + 1]);
  const auto it = std::lower_bound(first, last, row);
  if (it == last || *it != row) return 0.0;
  return values_[static_cast<std::size_t>(it - row_idx_.begin())];
}

double SparseGenerator::column_sum(std::size_t col) const {
  double s = 0.0;
  for (std::size_t p = col_ptr_[col]; p < col_ptr_[col + 1]; ++p) s += values_[p];
  return s;
}

double SparseGenerator::column_abs_max(std::size_t col) const {
  double m = 0.0;
  for (std::size_t p = col_ptr_[col]; p < col_ptr_[col + 1]; ++p) {
    m = std::max(m, std::abs(values_[p]));
  }
  return m;
}

void SparseGenerator::multiply(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  const std::size_t* rows = row_idx_.data();
  const double* vals = values_.data();
  for (std::size_t j = 0; j < n_; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    for (std::size_t p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) y[rows[p]] += vals[p] * xj;
  }
}

double SparseGenerator::norm1() const {
  double m = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    double s = 0.0;
    for (std::size_t p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) s += std::abs(values_[p]);
    m = std::max(m, s);
  }
  return m;
}

Eigen::MatrixXd SparseGenerator::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_),
                                            static_cast<Eigen::Index>(n_));
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      d(static_cast<Eigen::Index>(row_idx_[p]), static_cast<Eigen::Index>(j)) = values_[p];
    }
  }
  return d;
}

ExitRates exit_rates(const StateSet& states, const ReactionNetwork& network) {
  ExitRates w(states.size(), 0.0);
  for (std::size_t i = 0; i < states.size(); ++i) w[i] = network.exit_rate(states[i]);
  return w;
}

namespace {

constexpr std::size_t kColumnGrain = 8192;

void check_dimensions(const StateSet& states, const ReactionNetwork& network) {
  if (states.num_species() != network.num_species()) {
    throw ConfigError("state set dimension does not match network");
  }
}

}  // namespace

SparseGenerator assemble(const StateSet& states, const ReactionNetwork& network,
                         GeneratorMode mode, AssemblyStats* stats) {
  check_dimensions(states, network);
  const std::size_t n = states.size();
  const std::size_t n_rxn = network.num_reactions();
  const std::size_t n_chunks = (n + kColumnGrain - 1) / kColumnGrain;
  std::vector<ColumnBuffer> chunks(n_chunks);

  parallel_chunks(n, kColumnGrain, [&](std::size_t begin, std::size_t end) {
    auto& buf = chunks[begin / kColumnGrain];
    buf.col_counts.reserve(end - begin);
    buf.rows.reserve((end - begin) * (n_rxn + 1));
    buf.vals.reserve((end - begin) * (n_rxn + 1));
    std::vector<Count> y;
    for (std::size_t j = begin; j < end; ++j) {
      const auto x = states[j];
      buf.begin_column();
      double w = 0.0;
      for (std::size_t k = 0; k < n_rxn; ++k) {
        const double alpha = network.propensity(k, x);
        w += alpha;
        if (!(alpha > 0.0)) continue;
        if (!apply_into(x, network.stoichiometry(k), y)) continue;
        if (const auto i = states.find(y)) buf.add(*i, alpha);
      }
      buf.finish_column(j, mode, w);
    }
  });

  if (stats) stats->propensity_evaluations += n * n_rxn;
  return GeneratorBuilder::build(n, mode, chunks);
}

SparseGenerator assemble_all_pairs(const StateSet& states, const ReactionNetwork& network,
                                   GeneratorMode mode, AssemblyStats* stats) {
  check_dimensions(states, network);
  const std::size_t n = states.size();
  const std::size_t n_rxn = network.num_reactions();
  const std::size_t n_species = network.num_species();
  std::vector<ColumnBuffer> chunks(1);
  auto& buf = chunks.front();
  std::vector<double> alpha(n_rxn);
  for (std::size_t j = 0; j < n; ++j) {
    const auto x = states[j];
    buf.begin_column();
    double w = 0.0;
    for (std::size_t k = 0; k < n_rxn; ++k) {
      alpha[k] = network.propensity(k, x);
      w += alpha[k];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto y = states[i];
      for (std::size_t k = 0; k < n_rxn; ++k) {
        const auto nu = network.stoichiometry(k);
        bool match = true;
        for (std::size_t s = 0; s < n_species && match; ++s) match = y[s] == x[s] + nu[s];
        if (match && alpha[k] > 0.0) buf.add(i, alpha[k]);
      }
    }
    buf.finish_column(j, mode, w);
  }
  if (stats) stats->propensity_evaluations += n * n_rxn;
  return GeneratorBuilder::build(n, mode, chunks);
}

SparseGenerator restrict_generator(const SparseGenerator& a, std::span<const std::size_t> keep,
                                   const StateSet& new_states, const ReactionNetwork& network) {
  check_dimensions(new_states, network);
  if (keep.size() != new_states.size()) {
    throw ConfigError("restrict_generator: keep set does not match the new state set");
  }
  std::vector<std::size_t> old_to_new(a.dim(), kDropped);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    if (keep[r] >= a.dim()) throw ConfigError("restrict_generator: index out of range");
    if (r > 0 && keep[r] <= keep[r - 1]) {
      throw ConfigError("restrict_generator: keep indices must be strictly increasing");
    }
    old_to_new[keep[r]] = r;
  }

  const auto col_ptr = a.col_ptr();
  const auto rows = a.row_index();
  const auto vals = a.values();
  std::vector<ColumnBuffer> chunks(1);
  auto& buf = chunks.front();
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const std::size_t j = keep[r];
    buf.begin_column();
    double diag = 0.0;
    for (std::size_t p = col_ptr[j]; p < col_ptr[j + 1]; ++p) {
      if (rows[p] == j) {
        diag = vals[p];
      } else if (old_to_new[rows[p]] != kDropped) {
        buf.add(old_to_new[rows[p]], vals[p]);
      }
    }
    // Truncated diagonals are -w(x), which does not depend on the set.
    buf.finish_column(r, a.mode(), -diag);
  }
  return GeneratorBuilder::build(keep.size(), a.mode(), chunks);
}

void write_matrix_market(std::ostream& out, const SparseGenerator& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.dim() << ' ' << a.dim() << ' ' << a.nonzeros() << '\n';
  const auto col_ptr = a.col_ptr();
  const auto rows = a.row_index();
  const auto vals = a.values();
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t j = 0; j < a.dim(); ++j) {
    for (std::size_t p = col_ptr[j]; p < col_ptr[j + 1]; ++p) {
      out << rows[p] + 1 << ' ' << j + 1 << ' ' << vals[p] << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace fluxfsp
