#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fluxfsp {

/// Molecule copy number of a single species.
using Count = std::int32_t;

/// Population state: one non-negative copy number per species.
class State {
 public:
  State() = default;
  explicit State(std::vector<Count> counts);
  State(std::initializer_list<Count> counts);
  explicit State(std::span<const Count> counts);

  std::size_t size() const noexcept { return counts_.size(); }
  Count operator[](std::size_t i) const { return counts_[i]; }
  std::span<const Count> counts() const noexcept { return counts_; }

  friend bool operator==(const State&, const State&) = default;
  friend auto operator<=>(const State&, const State&) = default;

 private:
  std::vector<Count> counts_;
};

/// Mass-action kinetics: k * prod_s C(x_s, r_s), i.e. the falling factorial
/// x_s (x_s - 1) ... (x_s - r_s + 1) divided by r_s! for each reactant.
struct MassAction {
  double rate = 0.0;
  std::vector<Count> reactants;
};

/// Zeroth-order production repressed by one species:
/// eta * (base + amplitude * K^n / (K^n + x_rep^n)).
struct HillProduction {
  double eta = 1.0;
  double base = 0.0;
  double amplitude = 0.0;
  double threshold = 0.0;
  double exponent = 1.0;
  std::size_t repressor = 0;
};

using RateLaw = std::variant<MassAction, HillProduction>;

struct Reaction {
  std::vector<Count> stoichiometry;
  RateLaw rate_law;
  std::string label;
};

/// Species list plus reactions. Construction validates every reaction against
/// the species count; the object is immutable afterwards.
class ReactionNetwork {
 public:
  ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions);

  std::size_t num_species() const noexcept { return species_.size(); }
  std::size_t num_reactions() const noexcept { return reactions_.size(); }
  const std::vector<std::string>& species() const noexcept { return species_; }
  const std::vector<Reaction>& reactions() const noexcept { return reactions_; }
  const Reaction& reaction(std::size_t k) const { return reactions_.at(k); }
  std::span<const Count> stoichiometry(std::size_t k) const { return reactions_[k].stoichiometry; }

  /// Propensity alpha_k(x) in 1/s. Throws std::out_of_range for a bad reaction
  /// index and ConfigError when x has the wrong number of species.
  double propensity(std::size_t k, std::span<const Count> x) const;
  double propensity(std::size_t k, const State& x) const { return propensity(k, x.counts()); }

  /// Sum of all propensities at x.
  double exit_rate(std::span<const Count> x) const;

 private:
  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
};

/// x + nu when every entry stays non-negative, std::nullopt otherwise.
std::optional<State> apply(const State& x, std::span<const Count> nu);

/// Allocation-free variant of apply() for inner loops; writes into out.
bool apply_into(std::span<const Count> x, std::span<const Count> nu, std::vector<Count>& out);

struct Model {
  std::string name;
  ReactionNetwork network;
  State initial_state;
};

struct BuiltinOptions {
  /// Volume scaling of the toggle switch production terms.
  double toggle_eta = 1.0;
};

/// One of "bottleneck", "toggle", "oregonator", "robertson".
Model builtin_model(std::string_view name, const BuiltinOptions& options = {});

std::vector<std::string> builtin_model_names();

}  // namespace fluxfsp
