#include "fluxfsp/state_set.hpp"

#include <algorithm>
#include <bit>

#include "fluxfsp/error.hpp"

namespace fluxfsp {

StateSet::StateSet(std::size_t num_species) : num_species_(num_species) { rehash(16); }

StateSet::StateSet(std::size_t num_species, std::span<const State> states) : StateSet(num_species) {
  reserve(states.size());
  for (const auto& x : states) {
    if (x.size() != num_species) throw ConfigError("state dimension does not match state set");
    insert(x.counts());
  }
}

std::uint64_t StateSet::hash(std::span<const Count> x) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (Count c : x) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(c)) + 0x9e3779b97f4a7c15ULL +
         (h << 6) + (h >> 2);
  }
  // splitmix64 finaliser
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

bool StateSet::equals(std::size_t i, std::span<const Count> x) const noexcept {
  const Count* s = counts_.data() + i * num_species_;
  return std::equal(x.begin(), x.end(), s);
}

std::optional<std::size_t> StateSet::find(std::span<const Count> x) const {
  if (x.size() != num_species_) throw ConfigError("state dimension does not match state set");
  const std::size_t mask = slots_.size() - 1;
  for (std::size_t pos = hash(x) & mask;; pos = (pos + 1) & mask) {
    const std::uint32_t slot = slots_[pos];
    if (slot == kEmpty) return std::nullopt;
    if (equals(slot, x)) return slot;
  }
}

std::pair<std::size_t, bool> StateSet::insert(std::span<const Count> x) {
  if (x.size() != num_species_) throw ConfigError("state dimension does not match state set");
  for (Count c : x) {
    if (c < 0) throw ConfigError("state has a negative copy number");
  }
  if (2 * (size_ + 1) > slots_.size()) rehash(2 * slots_.size());
  const std::size_t mask = slots_.size() - 1;
  std::size_t pos = hash(x) & mask;
  for (;; pos = (pos + 1) & mask) {
    const std::uint32_t slot = slots_[pos];
    if (slot == kEmpty) break;
    if (equals(slot, x)) return {slot, false};
  }
  slots_[pos] = static_cast<std::uint32_t>(size_);
  counts_.insert(counts_.end(), x.begin(), x.end());
  return {size_++, true};
}

void StateSet::reserve(std::size_t n) {
  counts_.reserve(n * num_species_);
  if (2 * n > slots_.size()) rehash(std::bit_ceil(2 * n));
}

void StateSet::rehash(std::size_t capacity) {
  capacity = std::max<std::size_t>(std::bit_ceil(capacity), 16);
  slots_.assign(capacity, kEmpty);
  const std::size_t mask = capacity - 1;
  for (std::size_t i = 0; i < size_; ++i) {
    std::size_t pos = hash((*this)[i]) & mask;
    while (slots_[pos] != kEmpty) pos = (pos + 1) & mask;
    slots_[pos] = static_cast<std::uint32_t>(i);
  }
}

StateSet expand(StateSet states, const ReactionNetwork& network, int radius) {
  if (radius < 1) throw ConfigError("expansion radius must be >= 1");
  if (states.num_species() != network.num_species()) {
    throw ConfigError("state set dimension does not match network");
  }
  // Round 1 sources are all of S; later rounds only need the states added in
  // the previous round, everything older has already been expanded.
  std::size_t begin = 0;
  std::size_t end = states.size();
  std::vector<Count> y;
  for (int round = 0; round < radius && begin < end; ++round) {
    for (std::size_t k = 0; k < network.num_reactions(); ++k) {
      const auto nu = network.stoichiometry(k);
      for (std::size_t i = begin; i < end; ++i) {
        const auto x = states[i];
        if (!(network.propensity(k, x) > 0.0)) continue;
        if (!apply_into(x, nu, y)) continue;
        states.insert(y);
      }
    }
    begin = end;
    end = states.size();
  }
  return states;
}

Restriction restrict(const StateSet& states, std::span<const std::size_t> keep) {
  if (keep.empty()) throw ConfigError("restrict: keep set is empty");
  std::vector<std::size_t> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.back() >= states.size()) throw ConfigError("restrict: index out of range");

  Restriction out{StateSet(states.num_species()), std::vector<std::size_t>(states.size(), kDropped)};
  out.states.reserve(sorted.size());
  for (std::size_t old : sorted) {
    out.old_to_new[old] = out.states.insert(states[old]).first;
  }
  return out;
}

}  // namespace fluxfsp
