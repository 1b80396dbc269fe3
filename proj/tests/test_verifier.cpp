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

#include <random>

#include "core/assembly.hpp"
#include "core/verifier.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace comag;
using comag_test::read_fixture;

namespace {

DirectMechanism mech(int principal, std::vector<int> assignment) {
  DirectMechanism m;
  m.principal = principal;
  m.assignment = std::move(assignment);
  return m;
}

FiniteGame with_prob(FiniteGame g, const Rational& p) {
  g.type_prob = {p, 1 - p};
  return g;
}

// Every strategy whose node weights are multiples of 1/8 over the
// indifference atoms, applied to verify_pbe; used to cross-check
// infeasibility verdicts exhaustively.
bool any_grid_strategy_supports(const FiniteGame& g, const MenuProfile& profile,
                                int resolution = 8) {
  // Collect indifference nodes (on-path and unilateral deviations).
  struct Node {
    MenuProfile mp;
    int type;
    std::vector<Choice> atoms;
  };
  std::vector<Node> nodes;
  auto add = [&](const MenuProfile& mp) {
    for (int t = 0; t < g.num_types(); ++t) {
      NodeChoices c = node_choice_set(g, mp, t);
      if (c.atoms.size() > 1) nodes.push_back({mp, t, c.atoms});
    }
  };
  add(profile);
  for (int i = 0; i < g.n(); ++i)
    for (Menu s = 1; s <= g.full_menu(i); ++s) {
      if (s == profile[i]) continue;
      MenuProfile mp = profile;
      mp[i] = s;
      add(mp);
    }

  // Enumerate weight vectors per node: compositions of `resolution` over the
  // atoms.
  std::vector<std::vector<std::vector<int>>> options(nodes.size());
  for (size_t k = 0; k < nodes.size(); ++k) {
    const int m = static_cast<int>(nodes[k].atoms.size());
    std::vector<int> comp(m, 0);
    auto rec = [&](auto&& self, int idx, int left) -> void {
      if (idx == m - 1) {
        comp[idx] = left;
        options[k].push_back(comp);
        return;
      }
      for (int take = 0; take <= left; ++take) {
        comp[idx] = take;
        self(self, idx + 1, left - take);
      }
    };
    rec(rec, 0, resolution);
  }

  std::vector<size_t> pick(nodes.size(), 0);
  for (;;) {
    AgentStrategy s;
    s.adversarial_reference = profile;
    s.lexicographic_default = true;
    for (size_t k = 0; k < nodes.size(); ++k) {
      ChoiceDist d;
      const auto& comp = options[k][pick[k]];
      for (size_t a = 0; a < nodes[k].atoms.size(); ++a)
        if (comp[a] > 0)
          d.atoms.emplace_back(nodes[k].atoms[a], Rational(comp[a], resolution));
      s.set(nodes[k].mp, nodes[k].type, d);
    }
    if (verify_pbe(g, profile, s).is_pbe) return true;
    size_t k = 0;
    while (k < nodes.size() && ++pick[k] == options[k].size()) pick[k++] = 0;
    if (k == nodes.size()) break;
    if (nodes.empty()) break;
  }
  return false;
}

}  // namespace

TEST_CASE("constructed strategy: singleton profile is the unique product") {
  FiniteGame g = load_game(read_fixture("cross_pairing_game.json"));
  AgentStrategy s = construct_agent_strategy(g, {mech(0, {0, 0}), mech(1, {0, 0})});
  auto d = resolve_choice(g, s, MenuProfile{Menu{1}, Menu{1}}, 0);
  REQUIRE(d.has_value());
  CHECK(d->atoms.size() == 1);
  CHECK(d->atoms[0].first.outcome == OutcomeProfile{0, 0});
}

TEST_CASE("constructed strategy: menu-trap witness is on-path at both types") {
  FiniteGame g = load_game(read_fixture("menu_trap_game.json"));
  AgentStrategy s = construct_agent_strategy(g, {mech(0, {0, 0}), mech(1, {0, 1})});
  MenuProfile on_path{Menu{1}, Menu{3}};
  for (int t = 0; t < 2; ++t) {
    auto d = resolve_choice(g, s, on_path, t);
    REQUIRE(d.has_value());
    CHECK(d->atoms[0].first.outcome == OutcomeProfile{0, 0});  // (a, b)
  }
  // And the assembled profile verifies as an equilibrium.
  EquilibriumCertificate cert = verify_pbe(g, on_path, s);
  CHECK(cert.is_pbe);
}

TEST_CASE("constructed strategy fails loudly when recombination fails") {
  FiniteGame g = load_game(read_fixture("cross_pairing_game.json"));
  CHECK_THROWS_AS(construct_agent_strategy(g, {mech(0, {0, 1}), mech(1, {0, 1})}),
                  GameFormatError);
}

TEST_CASE("constructed strategy passes a per-node optimality audit on separable games") {
  std::mt19937_64 rng(24001);
  for (int k = 0; k < 20; ++k) {
    FiniteGame g = comag_test::random_separable_game(rng, 2, 2, 2);
    ProfileSearchResult res = find_p3_induced_profiles(g);
    for (const auto& p : res.profiles) {
      AgentStrategy s = construct_agent_strategy(g, p.mechanisms);
      for (int i = 0; i < g.n(); ++i)
        for (Menu m = 1; m <= g.full_menu(i); ++m) {
          MenuProfile node = p.menus;
          node[i] = m;
          for (int t = 0; t < g.num_types(); ++t) {
            auto d = resolve_choice(g, s, node, t);
            REQUIRE(d.has_value());
            CHECK(choice_dist_is_optimal(g, node, t, *d));
          }
        }
    }
  }
}

TEST_CASE("shield game: the wide profile verifies with deviations capped at 2") {
  FiniteGame g = load_game(read_fixture("shield_game.json"));
  AgentStrategy s;
  s.lexicographic_default = true;
  MenuProfile profile{Menu{0b111}, Menu{1}};
  EquilibriumCertificate cert = verify_pbe(g, profile, s);
  CHECK(cert.is_pbe);
  CHECK(cert.equilibrium_payoff == std::vector<Rational>{Rational(4), Rational(2)});
  for (const auto& d : cert.deviations)
    if (d.principal == 1) CHECK(d.payoff <= Rational(2));
}

TEST_CASE("cross-pairing game at a high weight: an adversarial strategy exposes a deviation") {
  FiniteGame g = with_prob(load_game(read_fixture("cross_pairing_game.json")),
                           Rational(9, 10));
  MenuProfile profile{Menu{3}, Menu{3}};
  // Any pure tie-breaking at the on-path node hands 10 to one principal's
  // rival; the loser deviates to her singleton favorite.
  AgentStrategy s;
  s.adversarial_reference = profile;
  s.lexicographic_default = true;
  ChoiceDist d;
  d.atoms.emplace_back(Choice{false, {0, 1}}, Rational(1));  // (a, b') at t1
  s.set(profile, 0, d);
  ChoiceDist d2;
  d2.atoms.emplace_back(Choice{false, {1, 1}}, Rational(1));
  s.set(profile, 1, d2);
  EquilibriumCertificate cert = verify_pbe(g, profile, s);
  CHECK_FALSE(cert.is_pbe);
  REQUIRE(cert.profitable_deviation.has_value());
  CHECK(cert.profitable_deviation->principal == 1);  // principal 2 walks away to {b}
}

TEST_CASE("single-principal verification coincides with screening optimality") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    FiniteGame g = comag_test::random_game(rng, 1, 2, 3);
    auto oracle = comag_test::screening_brute_force(g, 0, MenuProfile{0});
    for (Menu m = 1; m <= g.full_menu(0); ++m) {
      AgentStrategy s;
      s.lexicographic_default = true;
      EquilibriumCertificate cert = verify_pbe(g, MenuProfile{m}, s);
      // The menu is an equilibrium iff the best agent-consistent payoff from
      // any menu cannot beat it; in the one-principal case that is exactly
      // attaining the screening optimum.
      if (cert.is_pbe) CHECK(cert.equilibrium_payoff[0] == oracle.value);
    }
  }
}

TEST_CASE("support feasibility at the boundary weight: witness interval collapses to 1/2") {
  FiniteGame g = with_prob(load_game(read_fixture("cross_pairing_game.json")), Rational(4, 5));
  SupportResult res = support_feasibility(g, MenuProfile{Menu{3}, Menu{3}});
  REQUIRE(res.error.empty());
  REQUIRE(res.feasible);
  // The on-path t1 node has exactly two atoms; its free weight is pinned to
  // 1/2 = (3p-2)/p = (2-2p)/p at p = 4/5.
  bool found = false;
  for (int v = 0; v < res.system.num_vars; ++v) {
    if (res.system.var_names[v].find("t1") != std::string::npos &&
        res.system.var_names[v].find("{a,a'} x {b,b'}") != std::string::npos) {
      CHECK(res.witness[v] == Rational(1, 2));
      found = true;
    }
  }
  CHECK(found);
  // The witness strategy supports the profile end to end.
  REQUIRE(res.strategy.has_value());
  CHECK(verify_pbe(g, MenuProfile{Menu{3}, Menu{3}}, *res.strategy).is_pbe);
}

TEST_CASE("support feasibility is exact: infeasible just past the boundary") {
  FiniteGame g = with_prob(load_game(read_fixture("cross_pairing_game.json")),
                           Rational(4, 5) + Rational(1, 100));
  SupportResult res = support_feasibility(g, MenuProfile{Menu{3}, Menu{3}});
  REQUIRE(res.error.empty());
  CHECK_FALSE(res.feasible);
  REQUIRE(res.contradiction.has_value());
  CHECK(res.contradiction->gap < 0);
}

TEST_CASE("support interval endpoints match the closed form at several weights") {
  for (const auto& [num, den, feasible] :
       {std::tuple{3, 4, true}, {4, 5, true}, {81, 100, false}, {9, 10, false}, {1, 2, true}}) {
    FiniteGame g = with_prob(load_game(read_fixture("cross_pairing_game.json")),
                             Rational(num, den));
    SupportResult res = support_feasibility(g, MenuProfile{Menu{3}, Menu{3}});
    CHECK(res.feasible == feasible);
  }
}

TEST_CASE("opt-out game: support iff the first type has probability zero") {
  FiniteGame g = load_game(read_fixture("opt_out_game.json"));
  SupportResult at_half = support_feasibility(g, MenuProfile{Menu{3}, Menu{3}});
  CHECK_FALSE(at_half.feasible);

  FiniteGame zero = with_prob(g, Rational(0));
  SupportResult at_zero = support_feasibility(zero, MenuProfile{Menu{3}, Menu{3}});
  CHECK(at_zero.feasible);

  FiniteGame tiny = with_prob(g, Rational(1, 1000));
  CHECK_FALSE(support_feasibility(tiny, MenuProfile{Menu{3}, Menu{3}}).feasible);
}

TEST_CASE("variable bound is enforced") {
  FiniteGame g = load_game(read_fixture("cross_pairing_game.json"));
  SupportResult res = support_feasibility(g, MenuProfile{Menu{3}, Menu{3}}, 0);
  CHECK_FALSE(res.error.empty());
}

TEST_CASE("agreement battery: support feasibility vs exhaustive strategy sampling") {
  std::mt19937_64 rng(321);
  int infeasible_seen = 0, feasible_seen = 0;
  for (int k = 0; k < 40; ++k) {
    FiniteGame g = comag_test::random_game(rng, 2, 2, 2, 3);
    MenuProfile profile{g.full_menu(0), g.full_menu(1)};
    SupportResult res = support_feasibility(g, profile);
    if (!res.error.empty()) continue;
    if (res.feasible) {
      ++feasible_seen;
      REQUIRE(res.strategy.has_value());
      CHECK(verify_pbe(g, profile, *res.strategy).is_pbe);
    } else {
      ++infeasible_seen;
      // No strategy on the 1/8 grid can support the profile either.
      CHECK_FALSE(any_grid_strategy_supports(g, profile));
    }
  }
  CHECK(feasible_seen > 0);
  CHECK(infeasible_seen > 0);
}

TEST_CASE("witnesses satisfy every original constraint exactly") {
  std::mt19937_64 rng(654);
  for (int k = 0; k < 25; ++k) {
    FiniteGame g = comag_test::random_game(rng, 2, 2, 2);
    MenuProfile profile{g.full_menu(0), g.full_menu(1)};
    SupportResult res = support_feasibility(g, profile);
    if (!res.error.empty() || !res.feasible) continue;
    for (const auto& c : res.system.constraints) {
      Rational lhs = 0;
      for (int v = 0; v < res.system.num_vars; ++v) lhs += c.coeff[v] * res.witness[v];
      CHECK(lhs <= c.rhs);
    }
  }
}

TEST_CASE("menu-shrinkage consistency: constant choice on a nested chain passes") {
  FiniteGame g = load_game(read_fixture("shield_game.json"));
  AgentStrategy s;
  s.lexicographic_default = true;  // unique optima by non-indifference
  std::vector<MenuProfile> chain{{Menu{0b001}, Menu{0b001}},
                                 {Menu{0b101}, Menu{0b001}},
                                 {Menu{0b111}, Menu{0b001}}};
  CHECK(check_iia(g, s, IiaVariant::iia1, chain).pass);
}

TEST_CASE("menu-shrinkage violation template is caught") {
  FiniteGame g = load_game(read_fixture("shield_game.json"));
  AgentStrategy s;
  MenuProfile small{Menu{0b011}, Menu{1}};  // {a,b} x {A}
  MenuProfile big{Menu{0b111}, Menu{1}};    // {a,b,c} x {A}
  // From the large profile the agent takes a at t1; from the small one she
  // inexplicably takes b although a survived the shrink.
  ChoiceDist takes_a;
  takes_a.atoms.emplace_back(Choice{false, {0, 0}}, Rational(1));
  ChoiceDist takes_b;
  takes_b.atoms.emplace_back(Choice{false, {1, 0}}, Rational(1));
  s.set(big, 0, takes_a);
  s.set(small, 0, takes_b);
  s.set(big, 1, takes_a);
  s.set(small, 1, takes_a);
  IiaReport report = check_iia(g, s, IiaVariant::iia1, {small, big});
  CHECK_FALSE(report.pass);
  REQUIRE(report.violation.has_value());
  CHECK(report.violation->type == 0);
}

TEST_CASE("conditional rescaling: uniform over three shrinks to half-half") {
  // A game with three tied outcome profiles for the single type.
  const std::string doc = R"({
    "principals": ["1", "2"],
    "types": [{"label": "t", "prob": "1"}],
    "outcomes": {"1": ["x", "y", "z"], "2": ["u"]},
    "agent_utility": [
      {"profile": ["x", "u"], "type": "t", "value": "1"},
      {"profile": ["y", "u"], "type": "t", "value": "1"},
      {"profile": ["z", "u"], "type": "t", "value": "1"}],
    "principal_utility": {"mode": "independent", "rows": [
      {"principal": "1", "profile": ["x"], "type": "t", "value": "0"},
      {"principal": "1", "profile": ["y"], "type": "t", "value": "0"},
      {"principal": "1", "profile": ["z"], "type": "t", "value": "0"},
      {"principal": "2", "profile": ["u"], "type": "t", "value": "0"}]}
  })";
  FiniteGame g = load_game(doc);
  MenuProfile big{Menu{0b111}, Menu{1}};
  MenuProfile small{Menu{0b011}, Menu{1}};
  AgentStrategy s;
  ChoiceDist uniform3;
  for (int o = 0; o < 3; ++o)
    uniform3.atoms.emplace_back(Choice{false, {o, 0}}, Rational(1, 3));
  s.set(big, 0, uniform3);

  ChoiceDist half;
  half.atoms.emplace_back(Choice{false, {0, 0}}, Rational(1, 2));
  half.atoms.emplace_back(Choice{false, {1, 0}}, Rational(1, 2));
  s.set(small, 0, half);
  CHECK(check_iia(g, s, IiaVariant::iia2, {small, big}).pass);

  // Any other split fails the exact rescaling identity.
  ChoiceDist skew;
  skew.atoms.emplace_back(Choice{false, {0, 0}}, Rational(2, 3));
  skew.atoms.emplace_back(Choice{false, {1, 0}}, Rational(1, 3));
  s.set(small, 0, skew);
  IiaReport bad = check_iia(g, s, IiaVariant::iia2, {small, big});
  CHECK_FALSE(bad.pass);
}
