#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "fluxfsp/error.hpp"
#include "fluxfsp/model_io.hpp"
#include "fluxfsp/network.hpp"
#include "helpers.hpp"

using namespace fluxfsp;

TEST_CASE("robertson propensities") {
  const Model m = builtin_model("robertson");
  CHECK(m.network.propensity(0, State{10000, 0, 0}) == doctest::Approx(400.0));
  // 2B needs two molecules.
  CHECK(m.network.propensity(1, State{0, 1, 5}) == 0.0);
  // k2 N_B (N_B - 1) / 2
  CHECK(m.network.propensity(1, State{0, 4, 0}) == doctest::Approx(3e7 * 6.0));
  CHECK(m.network.propensity(2, State{0, 3, 7}) == doctest::Approx(1e4 * 21.0));
}

TEST_CASE("toggle production at the origin") {
  const Model m = builtin_model("toggle");
  CHECK(m.network.propensity(0, State{0, 0}) == doctest::Approx(420.0));
  CHECK(m.network.propensity(1, State{1, 0}) == doctest::Approx(1.0 + 0.1 / 1.1));
  // At V = K the repression factor is one half.
  CHECK(m.network.propensity(0, State{0, 100}) == doctest::Approx(20.0 + 200.0));

  BuiltinOptions opts;
  opts.toggle_eta = 100.0;
  const Model scaled = builtin_model("toggle", opts);
  CHECK(scaled.network.propensity(2, State{0, 0}) == doctest::Approx(42000.0));
}

TEST_CASE("builtin model parameters") {
  const Model b = builtin_model("bottleneck");
  CHECK(b.network.num_species() == 3);
  CHECK(b.network.num_reactions() == 2);
  CHECK(b.initial_state == State{1, 0, 0});
  CHECK(b.network.propensity(0, b.initial_state) == doctest::Approx(1e-6));
  CHECK(b.network.propensity(1, b.initial_state) == 0.0);

  const Model r = builtin_model("robertson");
  CHECK(r.initial_state == State{10000, 0, 0});
  CHECK(std::get<MassAction>(r.network.reaction(0).rate_law).rate == 0.04);
  CHECK(std::get<MassAction>(r.network.reaction(1).rate_law).rate == 3e7);
  CHECK(std::get<MassAction>(r.network.reaction(2).rate_law).rate == 1e4);

  const Model o = builtin_model("oregonator");
  CHECK(o.network.num_reactions() == 5);
  const double k[] = {2.0, 0.1, 104.0, 0.016, 26.0};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(std::get<MassAction>(o.network.reaction(i).rate_law).rate == k[i]);
  }
  CHECK(builtin_model("toggle").initial_state == State{85, 5});
  CHECK_THROWS_AS(builtin_model("brusselator"), ConfigError);
}

TEST_CASE("oregonator steady-state flux balance") {
  const Model o = builtin_model("oregonator");
  const State x{500, 1000, 2000};
  CHECK(o.network.propensity(0, x) == doctest::Approx(2000.0));
  CHECK(o.network.propensity(1, x) == doctest::Approx(50000.0));
  CHECK(o.network.propensity(2, x) == doctest::Approx(52000.0));
  CHECK(o.network.propensity(3, x) == doctest::Approx(1996.0));
  CHECK(o.network.propensity(4, x) == doctest::Approx(52000.0));
  CHECK(o.network.exit_rate(x.counts()) == doctest::Approx(157996.0));
  CHECK(o.network.exit_rate(State{0, 0, 0}.counts()) == 0.0);
}

TEST_CASE("robertson reactions conserve A + B + C") {
  const Model r = builtin_model("robertson");
  for (std::size_t k = 0; k < r.network.num_reactions(); ++k) {
    const auto nu = r.network.stoichiometry(k);
    CHECK(std::accumulate(nu.begin(), nu.end(), 0) == 0);
  }
}

TEST_CASE("propensity errors") {
  const Model b = builtin_model("bottleneck");
  CHECK_THROWS_AS(b.network.propensity(2, State{1, 0, 0}), std::out_of_range);
  CHECK_THROWS_AS(b.network.propensity(0, State{1, 0}), ConfigError);
  CHECK_THROWS_AS(State({1, -1}), ConfigError);
}

TEST_CASE("propensities are non-negative and vanish exactly below reactant counts") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Count> count(0, 40);
  for (const auto& name : builtin_model_names()) {
    const Model m = builtin_model(name);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<Count> x(m.network.num_species());
      for (auto& c : x) c = count(rng);
      for (std::size_t k = 0; k < m.network.num_reactions(); ++k) {
        const double a = m.network.propensity(k, x);
        CHECK(a >= 0.0);
        if (const auto* ma = std::get_if<MassAction>(&m.network.reaction(k).rate_law)) {
          bool short_of = false;
          for (std::size_t s = 0; s < x.size(); ++s) short_of = short_of || x[s] < ma->reactants[s];
          CHECK((a == 0.0) == short_of);
        }
      }
    }
  }
}

TEST_CASE("large counts stay finite") {
  ReactionNetwork net({"A"}, {Reaction{{-3}, MassAction{1.0, {3}}, "3A -> 0"}});
  const double a = net.propensity(0, State{10'000'000});
  const double n = 1e7;
  CHECK(a == doctest::Approx(n * (n - 1) * (n - 2) / 6.0));
}

TEST_CASE("apply") {
  CHECK(fluxfsp::apply(State{1, 0, 0}, std::vector<Count>{-1, 1, 0}) == State{0, 1, 0});
  CHECK(fluxfsp::apply(State{0, 1, 5}, std::vector<Count>{0, 0, 1}) == State{0, 1, 6});
  CHECK_FALSE(fluxfsp::apply(State{0, 0, 0}, std::vector<Count>{-1, 1, 0}).has_value());
}

TEST_CASE("network validation") {
  CHECK_THROWS_AS(ReactionNetwork({}, {}), ConfigError);
  CHECK_THROWS_AS(ReactionNetwork({"A"}, {}), ConfigError);
  CHECK_THROWS_AS(ReactionNetwork({"A"}, {Reaction{{1, 0}, MassAction{1.0, {}}, ""}}), ConfigError);
  CHECK_THROWS_AS(ReactionNetwork({"A"}, {Reaction{{1}, MassAction{-1.0, {}}, ""}}), ConfigError);
  CHECK_THROWS_AS(ReactionNetwork({"A"}, {Reaction{{1}, HillProduction{1, 1, 1, 1, 0.5, 0}, ""}}),
                  ConfigError);
  CHECK_THROWS_AS(ReactionNetwork({"A"}, {Reaction{{1}, HillProduction{1, 1, 1, 1, 2, 3}, ""}}),
                  ConfigError);
}

TEST_CASE("model json round trip") {
  for (const auto& name : builtin_model_names()) {
    const Model m = builtin_model(name);
    const Model back = parse_model(model_to_json(m));
    REQUIRE(back.network.num_reactions() == m.network.num_reactions());
    CHECK(back.initial_state == m.initial_state);
    CHECK(back.network.species() == m.network.species());
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
      const StateSet box = testing::random_box(m, rng, 50);
      for (std::size_t j = 0; j < box.size(); ++j) {
        for (std::size_t k = 0; k < m.network.num_reactions(); ++k) {
          CHECK(back.network.propensity(k, box[j]) == m.network.propensity(k, box[j]));
        }
      }
    }
  }
}

TEST_CASE("model json parsing") {
  const Model m = parse_model(R"({
    "name": "dimer",
    "species": ["M", "D"],
    "reactions": [
      {"stoichiometry": [-2, 1], "rate_law": {"type": "mass_action", "rate": 0.5}},
      {"stoichiometry": [1, 0], "rate_law": {"type": "hill_production", "base": 1,
        "amplitude": 9, "threshold": 2, "exponent": 2, "repressor": "D"}, "label": "make M"}
    ],
    "initial_state": [4, 0]
  })");
  CHECK(m.name == "dimer");
  CHECK(m.network.propensity(0, State{4, 0}) == doctest::Approx(0.5 * 6.0));
  CHECK(m.network.propensity(1, State{0, 2}) == doctest::Approx(1.0 + 9.0 * 0.5));

  CHECK_THROWS_AS(parse_model("{"), ConfigError);
  CHECK_THROWS_AS(parse_model(R"({"species": ["A"], "reactions": [], "initial_state": [0]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_model(R"({"species": ["A"], "reactions": [{"stoichiometry": [1],
      "rate_law": {"type": "magic"}}], "initial_state": [0]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_model(R"({"species": ["A"], "reactions": [{"stoichiometry": [1],
      "rate_law": {"type": "mass_action", "rate": 1}}], "initial_state": [0, 1]})"),
                  ConfigError);
}
