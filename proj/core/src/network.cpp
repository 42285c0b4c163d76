#include "fluxfsp/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

#include "fluxfsp/error.hpp"

namespace fluxfsp {

State::State(std::vector<Count> counts) : counts_(std::move(counts)) {
  for (Count c : counts_) {
    if (c < 0) throw ConfigError("state has a negative copy number");
  }
}

State::State(std::initializer_list<Count> counts) : State(std::vector<Count>(counts)) {}

State::State(std::span<const Count> counts)
    : State(std::vector<Count>(counts.begin(), counts.end())) {}

namespace {

double mass_action(const MassAction& law, std::span<const Count> x) {
  double a = law.rate;
  for (std::size_t s = 0; s < law.reactants.size(); ++s) {
    const Count r = law.reactants[s];
    if (r == 0) continue;
    if (x[s] < r) return 0.0;
    // Falling factorial over r!, accumulated term by term so large counts do
    // not overflow before the division.
    for (Count j = 0; j < r; ++j) {
      a *= static_cast<double>(x[s] - j) / static_cast<double>(j + 1);
    }
  }
  return a;
}

double hill_production(const HillProduction& law, std::span<const Count> x) {
  const double kn = std::pow(law.threshold, law.exponent);
  const double xn = std::pow(static_cast<double>(x[law.repressor]), law.exponent);
  const double denom = kn + xn;
  const double repression = denom > 0.0 ? kn / denom : 1.0;
  return law.eta * (law.base + law.amplitude * repression);
}

void validate_reaction(const Reaction& rxn, std::size_t k, std::size_t n_species) {
  const std::string where = "reaction " + std::to_string(k) +
                            (rxn.label.empty() ? "" : " (" + rxn.label + ")");
  if (rxn.stoichiometry.size() != n_species) {
    throw ConfigError(where + ": stoichiometry length does not match species count");
  }
  bool any_change = false;
  for (Count v : rxn.stoichiometry) any_change = any_change || v != 0;
  if (!any_change) throw ConfigError(where + ": stoichiometry is all zero");

  if (const auto* ma = std::get_if<MassAction>(&rxn.rate_law)) {
    if (!(ma->rate >= 0.0) || !std::isfinite(ma->rate)) {
      throw ConfigError(where + ": mass-action rate must be finite and >= 0");
    }
    if (!ma->reactants.empty() && ma->reactants.size() != n_species) {
      throw ConfigError(where + ": reactant vector length does not match species count");
    }
    for (Count r : ma->reactants) {
      if (r < 0) throw ConfigError(where + ": negative reactant count");
    }
  } else {
    const auto& h = std::get<HillProduction>(rxn.rate_law);
    for (double v : {h.eta, h.base, h.amplitude, h.threshold}) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ConfigError(where + ": Hill parameters must be finite and >= 0");
      }
    }
    if (!(h.exponent >= 1.0)) throw ConfigError(where + ": Hill exponent must be >= 1");
    if (h.repressor >= n_species) throw ConfigError(where + ": repressor index out of range");
  }
}

}  // namespace

ReactionNetwork::ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
  if (species_.empty()) throw ConfigError("network needs at least one species");
  if (reactions_.empty()) throw ConfigError("network needs at least one reaction");
  for (std::size_t k = 0; k < reactions_.size(); ++k) {
    auto& rxn = reactions_[k];
    validate_reaction(rxn, k, species_.size());
    if (auto* ma = std::get_if<MassAction>(&rxn.rate_law); ma && ma->reactants.empty()) {
      ma->reactants.assign(species_.size(), 0);
    }
  }
}

double ReactionNetwork::propensity(std::size_t k, std::span<const Count> x) const {
  if (k >= reactions_.size()) throw std::out_of_range("reaction index out of range");
  if (x.size() != species_.size()) throw ConfigError("state dimension does not match network");
  return std::visit(
      [&](const auto& law) {
        using Law = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<Law, MassAction>) {
          return mass_action(law, x);
        } else {
          return hill_production(law, x);
        }
      },
      reactions_[k].rate_law);
}

double ReactionNetwork::exit_rate(std::span<const Count> x) const {
  double w = 0.0;
  for (std::size_t k = 0; k < reactions_.size(); ++k) w += propensity(k, x);
  return w;
}

bool apply_into(std::span<const Count> x, std::span<const Count> nu, std::vector<Count>& out) {
  out.resize(x.size());
  for (std::size_t s = 0; s < x.size(); ++s) {
    const Count y = x[s] + nu[s];
    if (y < 0) return false;
    out[s] = y;
  }
  return true;
}

std::optional<State> apply(const State& x, std::span<const Count> nu) {
  if (nu.size() != x.size()) throw ConfigError("stoichiometry dimension does not match state");
  std::vector<Count> out;
  if (!apply_into(x.counts(), nu, out)) return std::nullopt;
  return State(std::move(out));
}

namespace {

Reaction mass_action_reaction(std::vector<Count> nu, double k, std::vector<Count> reactants,
                              std::string label) {
  return Reaction{std::move(nu), MassAction{k, std::move(reactants)}, std::move(label)};
}

Model bottleneck() {
  std::vector<Reaction> r;
  r.push_back(mass_action_reaction({-1, 1, 0}, 1e-6, {1, 0, 0}, "A -> B"));
  r.push_back(mass_action_reaction({0, 0, 1}, 1.0, {0, 1, 0}, "B -> B + C"));
  return {"bottleneck", ReactionNetwork({"A", "B", "C"}, std::move(r)), State{1, 0, 0}};
}

Model toggle(double eta) {
  // Degradation of U: d1 + s*gamma/(1+s) has no state dependence, so it is an
  // effective first-order rate constant.
  constexpr double d1 = 1.0, s = 0.1, gamma = 1.0, d2 = 1.0;
  std::vector<Reaction> r;
  r.push_back({{1, 0}, HillProduction{eta, 20.0, 400.0, 100.0, 3.0, 1}, "0 -> U"});
  r.push_back(mass_action_reaction({-1, 0}, d1 + s * gamma / (1.0 + s), {1, 0}, "U -> 0"));
  r.push_back({{0, 1}, HillProduction{eta, 20.0, 400.0, 100.0, 3.0, 0}, "0 -> V"});
  r.push_back(mass_action_reaction({0, -1}, d2, {0, 1}, "V -> 0"));
  return {"toggle", ReactionNetwork({"U", "V"}, std::move(r)), State{85, 5}};
}

Model oregonator() {
  std::vector<Reaction> r;
  r.push_back(mass_action_reaction({1, -1, 0}, 2.0, {0, 1, 0}, "Y -> X"));
  r.push_back(mass_action_reaction({-1, -1, 0}, 0.1, {1, 1, 0}, "X + Y -> 0"));
  r.push_back(mass_action_reaction({1, 0, 1}, 104.0, {1, 0, 0}, "X -> 2X + Z"));
  r.push_back(mass_action_reaction({-2, 0, 0}, 0.016, {2, 0, 0}, "2X -> 0"));
  r.push_back(mass_action_reaction({0, 1, -1}, 26.0, {0, 0, 1}, "Z -> Y"));
  return {"oregonator", ReactionNetwork({"X", "Y", "Z"}, std::move(r)), State{500, 1000, 2000}};
}

Model robertson() {
  std::vector<Reaction> r;
  r.push_back(mass_action_reaction({-1, 1, 0}, 0.04, {1, 0, 0}, "A -> B"));
  r.push_back(mass_action_reaction({0, -1, 1}, 3e7, {0, 2, 0}, "2B -> B + C"));
  r.push_back(mass_action_reaction({1, -1, 0}, 1e4, {0, 1, 1}, "B + C -> A + C"));
  return {"robertson", ReactionNetwork({"A", "B", "C"}, std::move(r)), State{10000, 0, 0}};
}

}  // namespace

Model builtin_model(std::string_view name, const BuiltinOptions& options) {
  if (name == "bottleneck") return bottleneck();
  if (name == "toggle") return toggle(options.toggle_eta);
  if (name == "oregonator") return oregonator();
  if (name == "robertson") return robertson();
  throw ConfigError("unknown built-in model '" + std::string(name) + "'");
}

std::vector<std::string> builtin_model_names() {
  return {"bottleneck", "toggle", "oregonator", "robertson"};
}

}  // namespace fluxfsp
