#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fluxfsp/network.hpp"

namespace fluxfsp {

/// Ordered set of population states with stable insertion-order indices.
///
/// States are stored contiguously (num_species counts per state); the index is
/// an open-addressing hash table of positions into that storage, so lookups do
/// not allocate and copies of the set stay self-consistent.
class StateSet {
 public:
  explicit StateSet(std::size_t num_species = 0);
  StateSet(std::size_t num_species, std::span<const State> states);

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  std::size_t num_species() const noexcept { return num_species_; }

  std::span<const Count> operator[](std::size_t i) const {
    return {counts_.data() + i * num_species_, num_species_};
  }
  State state(std::size_t i) const { return State((*this)[i]); }

  std::optional<std::size_t> find(std::span<const Count> x) const;
  std::optional<std::size_t> find(const State& x) const { return find(x.counts()); }
  bool contains(std::span<const Count> x) const { return find(x).has_value(); }

  /// Appends x unless present. Returns its index and whether it was inserted.
  std::pair<std::size_t, bool> insert(std::span<const Count> x);
  std::pair<std::size_t, bool> insert(const State& x) { return insert(x.counts()); }

  void reserve(std::size_t n);

  /// Raw contiguous counts, state-major.
  std::span<const Count> data() const noexcept { return {counts_.data(), size_ * num_species_}; }

 private:
  static constexpr std::uint32_t kEmpty = std::numeric_limits<std::uint32_t>::max();

  std::uint64_t hash(std::span<const Count> x) const noexcept;
  bool equals(std::size_t i, std::span<const Count> x) const noexcept;
  void rehash(std::size_t capacity);

  std::size_t num_species_ = 0;
  std::size_t size_ = 0;
  std::vector<Count> counts_;
  std::vector<std::uint32_t> slots_;
};

/// Marks dropped entries in an old-to-new index map.
inline constexpr std::size_t kDropped = std::numeric_limits<std::size_t>::max();

/// S plus every state reachable from S by at most `radius` admissible firings
/// (positive propensity, non-negative destination). Existing indices are kept;
/// new states are appended by round, then reaction index, then source index.
StateSet expand(StateSet states, const ReactionNetwork& network, int radius = 1);

struct Restriction {
  StateSet states;
  /// old index -> new index, kDropped for removed states.
  std::vector<std::size_t> old_to_new;
};

/// Keeps the listed indices (any order, duplicates ignored) preserving the
/// relative order of the kept states. Throws ConfigError when keep is empty.
Restriction restrict(const StateSet& states, std::span<const std::size_t> keep);

}  // namespace fluxfsp
