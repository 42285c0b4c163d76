#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fluxfsp/error.hpp"
#include "fluxfsp/state_set.hpp"
#include "helpers.hpp"

using namespace fluxfsp;

namespace {

std::set<std::vector<Count>> as_set(const StateSet& s) {
  std::set<std::vector<Count>> out;
  for (std::size_t i = 0; i < s.size(); ++i) out.emplace(s[i].begin(), s[i].end());
  return out;
}

}  // namespace

TEST_CASE("insert and find keep indices consistent") {
  StateSet s(2);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Count> c(0, 60);
  std::set<std::vector<Count>> seen;
  for (int i = 0; i < 5000; ++i) {
    std::vector<Count> x{c(rng), c(rng)};
    const auto [idx, inserted] = s.insert(x);
    CHECK(inserted == seen.insert(x).second);
    CHECK(std::equal(x.begin(), x.end(), s[idx].begin()));
  }
  CHECK(s.size() == seen.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.find(s[i]) == i);
  CHECK_FALSE(s.contains(std::vector<Count>{61, 0}));
  CHECK_THROWS_AS(s.insert(std::vector<Count>{1}), ConfigError);
  CHECK_THROWS_AS(s.insert(std::vector<Count>{-1, 0}), ConfigError);
}

TEST_CASE("copies are independent") {
  StateSet a(1);
  a.insert(State{1});
  StateSet b = a;
  b.insert(State{2});
  CHECK(a.size() == 1);
  CHECK(b.size() == 2);
  CHECK(b.find(State{1}) == 0);
}

TEST_CASE("bottleneck expansion") {
  const Model m = builtin_model("bottleneck");
  StateSet s(3);
  s.insert(m.initial_state);
  const StateSet one = expand(s, m.network, 1);
  REQUIRE(one.size() == 2);
  CHECK(one.state(0) == State{1, 0, 0});
  CHECK(one.state(1) == State{0, 1, 0});
  const StateSet two = expand(s, m.network, 2);
  REQUIRE(two.size() == 3);
  CHECK(two.state(2) == State{0, 1, 1});
}

TEST_CASE("expansion from an absorbing state is a no-op") {
  const Model m = builtin_model("oregonator");
  StateSet s(3);
  s.insert(State{0, 0, 0});
  CHECK(expand(s, m.network, 3).size() == 1);
}

TEST_CASE("expansion order is round, reaction, source") {
  ReactionNetwork net({"A", "B"}, {Reaction{{1, 0}, MassAction{1.0, {0, 0}}, ""},
                                   Reaction{{0, 1}, MassAction{1.0, {0, 0}}, ""}});
  StateSet s(2);
  s.insert(State{0, 0});
  s.insert(State{5, 5});
  const StateSet e = expand(s, net, 1);
  REQUIRE(e.size() == 6);
  CHECK(e.state(2) == State{1, 0});
  CHECK(e.state(3) == State{6, 5});
  CHECK(e.state(4) == State{0, 1});
  CHECK(e.state(5) == State{5, 6});
}

TEST_CASE("expansion properties on random boxes") {
  std::mt19937_64 rng(5);
  for (const auto& name : builtin_model_names()) {
    const Model m = builtin_model(name);
    for (int trial = 0; trial < 10; ++trial) {
      const StateSet s = testing::random_box(m, rng, 60);
      const StateSet e1 = expand(s, m.network, 1);
      const StateSet e2 = expand(s, m.network, 2);
      // Original indices are preserved.
      for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::ranges::equal(s[i], e1[i]));
      CHECK(as_set(expand(e1, m.network, 1)) == as_set(e2));
      // Every new state has an admissible in-set predecessor.
      std::vector<Count> y;
      for (std::size_t i = s.size(); i < e1.size(); ++i) {
        bool found = false;
        for (std::size_t j = 0; j < s.size() && !found; ++j) {
          for (std::size_t k = 0; k < m.network.num_reactions() && !found; ++k) {
            found = m.network.propensity(k, s[j]) > 0.0 &&
                    apply_into(s[j], m.network.stoichiometry(k), y) && std::ranges::equal(y, e1[i]);
          }
        }
        CHECK(found);
      }
      CHECK(as_set(expand(s, m.network, 2)) == as_set(e2));
    }
  }
}

TEST_CASE("expansion is deterministic") {
  const Model m = builtin_model("toggle");
  StateSet s(2);
  s.insert(m.initial_state);
  const StateSet a = expand(s, m.network, 8);
  const StateSet b = expand(s, m.network, 8);
  CHECK(std::ranges::equal(a.data(), b.data()));
}

TEST_CASE("restrict") {
  StateSet s(1);
  for (Count i = 0; i < 4; ++i) s.insert(State{i * 10});
  const std::vector<std::size_t> all{0, 1, 2, 3};
  const Restriction id = restrict(s, all);
  CHECK(id.old_to_new == all);
  CHECK(std::ranges::equal(id.states.data(), s.data()));

  const std::vector<std::size_t> keep{2, 0, 2};
  const Restriction r = restrict(s, keep);
  REQUIRE(r.states.size() == 2);
  CHECK(r.states.state(0) == State{0});
  CHECK(r.states.state(1) == State{20});
  CHECK(r.old_to_new == std::vector<std::size_t>{0, kDropped, 1, kDropped});
  CHECK(r.states.find(State{20}) == 1);

  CHECK_THROWS_AS(restrict(s, std::vector<std::size_t>{}), ConfigError);
}
