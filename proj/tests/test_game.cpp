// Copyright 2026 The comag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include "core/game.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace comag;
using comag_test::read_fixture;

TEST_CASE("cross-pairing fixture loads with all eight agent entries") {
  FiniteGame g = load_game(read_fixture("cross_pairing_game.json"));
  CHECK(g.n() == 2);
  CHECK(g.num_types() == 2);
  CHECK(g.agent_table.size() == 8);
  CHECK(g.agent_value({0, 1}, 0) == Rational(10));  // (a, b') at t1
  CHECK(g.own_value(0, 0, 0) == Rational(5));       // u_1(a, t1)
  CHECK(g.own_value(1, 1, 1) == Rational(10));      // u_2(b', t2)
  CHECK(g.type_prob[0] == Rational(4, 5));
}

TEST_CASE("smallest legal game loads") {
  const std::string doc = R"({
    "principals": ["1"],
    "types": [{"label": "t", "prob": "1"}],
    "outcomes": {"1": ["x"]},
    "agent_utility": [{"profile": ["x"], "type": "t", "value": "0"}],
    "principal_utility": {"mode": "independent",
      "rows": [{"principal": "1", "profile": ["x"], "type": "t", "value": "1"}]}
  })";
  FiniteGame g = load_game(doc);
  CHECK(g.n() == 1);
  CHECK(g.profile_count() == 1);
}

TEST_CASE("bad distribution is rejected with the exact sum") {
  const std::string doc = R"({
    "principals": ["1"],
    "types": [{"label": "t1", "prob": "1/3"}, {"label": "t2", "prob": "1/3"},
              {"label": "t3", "prob": "1/4"}],
    "outcomes": {"1": ["x"]},
    "agent_utility": [
      {"profile": ["x"], "type": "t1", "value": "0"},
      {"profile": ["x"], "type": "t2", "value": "0"},
      {"profile": ["x"], "type": "t3", "value": "0"}],
    "principal_utility": {"mode": "independent", "rows": [
      {"principal": "1", "profile": ["x"], "type": "t1", "value": "1"},
      {"principal": "1", "profile": ["x"], "type": "t2", "value": "1"},
      {"principal": "1", "profile": ["x"], "type": "t3", "value": "1"}]}
  })";
  CHECK_THROWS_WITH_AS(load_game(doc), doctest::Contains("sums to 11/12"), GameFormatError);
}

TEST_CASE("missing table entries are rejected") {
  const std::string doc = R"({
    "principals": ["1"],
    "types": [{"label": "t", "prob": "1"}],
    "outcomes": {"1": ["x", "y"]},
    "agent_utility": [{"profile": ["x"], "type": "t", "value": "0"}],
    "principal_utility": {"mode": "independent",
      "rows": [{"principal": "1", "profile": ["x"], "type": "t", "value": "1"}]}
  })";
  CHECK_THROWS_AS(load_game(doc), GameFormatError);
}

TEST_CASE("independent-mode rows that vary with rivals are rejected") {
  const std::string doc = R"({
    "principals": ["1", "2"],
    "types": [{"label": "t", "prob": "1"}],
    "outcomes": {"1": ["x"], "2": ["u", "v"]},
    "agent_utility": [
      {"profile": ["x", "u"], "type": "t", "value": "0"},
      {"profile": ["x", "v"], "type": "t", "value": "0"}],
    "principal_utility": {"mode": "independent", "rows": [
      {"principal": "1", "profile": ["x", "u"], "type": "t", "value": "1"},
      {"principal": "1", "profile": ["x", "v"], "type": "t", "value": "2"},
      {"principal": "2", "profile": ["u"], "type": "t", "value": "0"},
      {"principal": "2", "profile": ["v"], "type": "t", "value": "0"}]}
  })";
  CHECK_THROWS_WITH_AS(load_game(doc), doctest::Contains("varies with rival"), GameFormatError);
}

TEST_CASE("round trip: load(serialize(g)) == g") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    FiniteGame g = comag_test::random_game(rng, 2 + static_cast<int>(rng() % 2), 2, 2);
    FiniteGame back = load_game(serialize_game(g));
    CHECK(back == g);
  }
  FiniteGame fixture = load_game(read_fixture("opt_out_game.json"));
  CHECK(load_game(serialize_game(fixture)) == fixture);
}

TEST_CASE("expected payoff matches a hand-built mixing strategy") {
  FiniteGame g = load_game(read_fixture("cross_pairing_game.json"));
  MenuProfile full{g.full_menu(0), g.full_menu(1)};

  // At t1 mix p_A on (a, b') and 1 - p_A on (a', b); at t2 take (a', b').
  AgentStrategy s;
  const Rational p_a(1, 3);
  ChoiceDist t1;
  t1.atoms.emplace_back(Choice{false, {0, 1}}, p_a);
  t1.atoms.emplace_back(Choice{false, {1, 0}}, 1 - p_a);
  s.set(full, 0, t1);
  ChoiceDist t2;
  t2.atoms.emplace_back(Choice{false, {1, 1}}, Rational(1));
  s.set(full, 1, t2);

  // Principal 1 payoff: p * 5 p_A + (1 - p) * 10 with p = 4/5.
  const Rational p(4, 5);
  CHECK(expected_principal_payoff(g, 0, s, full) == p * 5 * p_a + (1 - p) * 10);
  // Principal 2 payoff: p * 5 (1 - p_A) + (1 - p) * 10.
  CHECK(expected_principal_payoff(g, 1, s, full) == p * 5 * (1 - p_a) + (1 - p) * 10);
}

TEST_CASE("expected payoff equals an independent straight-line evaluation") {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 25; ++k) {
    FiniteGame g = comag_test::random_game(rng, 2, 2, 2);
    MenuProfile full{g.full_menu(0), g.full_menu(1)};
    AgentStrategy s;
    std::vector<std::vector<std::pair<OutcomeProfile, Rational>>> table(g.num_types());
    for (int t = 0; t < g.num_types(); ++t) {
      NodeChoices node = node_choice_set(g, full, t);
      ChoiceDist d;
      Rational w(1, static_cast<long long>(node.atoms.size()));
      for (const Choice& c : node.atoms) {
        d.atoms.emplace_back(c, w);
        table[t].emplace_back(c.outcome, w);
      }
      s.set(full, t, d);
    }
    for (int i = 0; i < g.n(); ++i)
      CHECK(expected_principal_payoff(g, i, s, full) ==
            comag_test::straight_line_expected_payoff(g, i, table));
  }
}

TEST_CASE("summation order does not matter: payoffs are exact") {
  FiniteGame g = load_game(read_fixture("shield_game.json"));
  MenuProfile full{g.full_menu(0), g.full_menu(1)};
  AgentStrategy s;
  s.lexicographic_default = true;
  // Reversing the type order must give the same rational.
  Rational forward = 0, backward = 0;
  for (int t = 0; t < g.num_types(); ++t) {
    auto d = resolve_choice(g, s, full, t);
    forward += g.type_prob[t] * dist_principal_payoff(g, 0, *d, t);
  }
  for (int t = g.num_types() - 1; t >= 0; --t) {
    auto d = resolve_choice(g, s, full, t);
    backward += g.type_prob[t] * dist_principal_payoff(g, 0, *d, t);
  }
  CHECK(forward == backward);
  CHECK(forward == expected_principal_payoff(g, 0, s, full));
}

TEST_CASE("strategy undefined at a needed node raises") {
  FiniteGame g = load_game(read_fixture("cross_pairing_game.json"));
  AgentStrategy s;  // no entries, no default
  MenuProfile full{g.full_menu(0), g.full_menu(1)};
  CHECK_THROWS_AS(expected_principal_payoff(g, 0, s, full), GameFormatError);
}

TEST_CASE("delegated outside options augment the choice set") {
  FiniteGame g = load_game(read_fixture("opt_out_game.json"));
  g.outside = OutsideKind::delegated;
  g.outside_option = {1, 1};  // a' and b'
  MenuProfile menus{Menu{1}, Menu{1}};  // {a} x {b}
  NodeChoices node = node_choice_set(g, menus, 1);
  // At t2 all contracting profiles give -2 except (a', b') = 0, which the
  // outside options make reachable.
  CHECK(node.max_value == Rational(0));
  REQUIRE(node.atoms.size() == 1);
  CHECK(node.atoms[0].outcome == OutcomeProfile{1, 1});
}

TEST_CASE("intrinsic quit forced exactly below zero") {
  FiniteGame g = load_game(read_fixture("opt_out_game.json"));
  MenuProfile menus{Menu{1}, g.full_menu(1)};  // {a} x {b, b'}
  NodeChoices t2 = node_choice_set(g, menus, 1);
  CHECK(t2.atoms.size() == 1);
  CHECK(t2.atoms[0].quit);
  // At the full profile the maximum is exactly 0, so the agent participates.
  MenuProfile full{g.full_menu(0), g.full_menu(1)};
  NodeChoices t2_full = node_choice_set(g, full, 1);
  CHECK(t2_full.max_value == Rational(0));
  for (const Choice& c : t2_full.atoms) CHECK(!c.quit);
}
