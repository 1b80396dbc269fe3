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

#include "core/assembly.hpp"

#include <algorithm>
#include <map>

#include "core/screening.hpp"

namespace comag {

namespace {

Rational assignment_payoff(const FiniteGame& game, int i, int assignment, int t) {
  if (assignment == kQuit) return Rational(0);
  return game.own_value(i, assignment, t);
}

Rational choice_component_payoff(const FiniteGame& game, int i, const Choice& c, int t) {
  if (c.quit) return Rational(0);
  return game.principal_value(i, c.outcome, t);
}

}  // namespace

CompatibilityReport check_compatibility(const FiniteGame& game,
                                        const std::vector<DirectMechanism>& mechanisms,
                                        CompatibilityVariant variant,
                                        const AgentStrategy* strategy) {
  CompatibilityReport report;
  report.variant = variant;
  const int T = game.num_types();

  std::vector<DirectMechanism> by_principal(game.n());
  for (const auto& m : mechanisms) {
    if (m.principal < 0 || m.principal >= game.n())
      throw GameFormatError("mechanism references an unknown principal");
    by_principal[m.principal] = m;
    by_principal[m.principal].principal = m.principal;
  }
  for (int i = 0; i < game.n(); ++i)
    if (static_cast<int>(by_principal[i].assignment.size()) != T)
      throw GameFormatError("one mechanism per principal is required");

  MenuProfile menus = menus_of(by_principal);

  if (variant == CompatibilityVariant::men) {
    if (strategy == nullptr)
      throw GameFormatError("menu-expansion check requires an agent strategy");
    report.pass = true;
    for (int i = 0; i < game.n(); ++i) {
      Rational full = 0, replaced = 0;
      for (int t = 0; t < T; ++t) {
        auto on = resolve_choice(game, *strategy, menus, t);
        MenuProfile single = menus;
        if (by_principal[i].assignment[t] == kQuit)
          throw GameFormatError("menu-expansion check does not take quit assignments");
        single[i] = Menu{1} << by_principal[i].assignment[t];
        auto rep = resolve_choice(game, *strategy, single, t);
        if (!on || !rep)
          throw GameFormatError("agent strategy undefined at a node needed by the check");
        full += game.type_prob[t] * dist_principal_payoff(game, i, *on, t);
        replaced += game.type_prob[t] * dist_principal_payoff(game, i, *rep, t);
      }
      if (full < replaced) {
        report.pass = false;
        report.detail = "principal " + game.principals[i] +
                        " gains from the per-type singleton replacement by " +
                        rat_to_string(replaced - full);
        return report;
      }
    }
    return report;
  }

  for (int i = 0; i < game.n(); ++i) {
    if (menus[i] == 0)
      throw GameFormatError("compatibility checking needs a nonempty menu per principal");
    for (int t = 0; t < T; ++t)
      if (by_principal[i].assignment[t] == kQuit && variant != CompatibilityVariant::upr_i)
        throw GameFormatError("quit assignments require the intrinsic variant");
  }

  report.pass = true;
  report.witness.resize(T);
  for (int t = 0; t < T; ++t) {
    NodeChoices node = node_choice_set(game, menus, t);

    if (variant == CompatibilityVariant::upr_i && node.max_value < 0) {
      // Negative maximum: the condition demands that every principal quits
      // this type.
      bool all_quit = true;
      for (int i = 0; i < game.n(); ++i)
        if (by_principal[i].assignment[t] != kQuit) all_quit = false;
      if (all_quit) {
        report.witness[t] = Choice{true, {}};
        continue;
      }
      report.pass = false;
      report.violating_type = t;
      report.agent_optimal_set = node.atoms;
      report.detail = "agent must quit at this type but some assignment is not quit";
      break;
    }

    const Choice* found = nullptr;
    for (const Choice& atom : node.atoms) {
      bool preserves = true;
      for (int i = 0; i < game.n() && preserves; ++i) {
        Rational intended = assignment_payoff(game, i, by_principal[i].assignment[t], t);
        if (choice_component_payoff(game, i, atom, t) != intended) preserves = false;
      }
      if (preserves && (!found || atom < *found)) found = &atom;
    }
    if (found) {
      report.witness[t] = *found;
      continue;
    }
    report.pass = false;
    report.violating_type = t;
    report.agent_optimal_set = node.atoms;
    for (const Choice& atom : node.atoms) {
      std::vector<Rational> gaps(game.n());
      for (int i = 0; i < game.n(); ++i)
        gaps[i] = choice_component_payoff(game, i, atom, t) -
                  assignment_payoff(game, i, by_principal[i].assignment[t], t);
      report.utility_gaps.push_back(std::move(gaps));
    }
    report.detail = "no utility-preserving recombination at type " + game.type_labels[t];
    break;
  }
  if (!report.pass) report.witness.clear();
  return report;
}

namespace {

bool check_additive(const FiniteGame& game, AdditiveDecomposition* out) {
  // Candidate components are forced (up to per-type constants) by evaluating
  // V along one-coordinate deviations from the reference profile 0.
  const int n = game.n();
  const int T = game.num_types();
  AdditiveDecomposition dec;
  dec.component.resize(n);
  OutcomeProfile ref(n, 0);
  for (int i = 0; i < n; ++i) {
    dec.component[i].assign(static_cast<size_t>(game.num_outcomes(i)) * T, Rational(0));
    for (int o = 0; o < game.num_outcomes(i); ++o)
      for (int t = 0; t < T; ++t) {
        OutcomeProfile p = ref;
        p[i] = o;
        Rational v = game.agent_value(p, t);
        if (i + 1 < n) v -= game.agent_value(ref, t);  // pin component to 0 at the reference
        dec.component[i][static_cast<size_t>(o) * T + t] = v;
      }
  }
  for (long long pi = 0; pi < game.profile_count(); ++pi) {
    OutcomeProfile o = game.profile_at(pi);
    for (int t = 0; t < T; ++t) {
      Rational sum = 0;
      for (int i = 0; i < n; ++i) sum += dec.component[i][static_cast<size_t>(o[i]) * T + t];
      if (sum != game.agent_value(o, t)) return false;
    }
  }
  if (out) *out = std::move(dec);
  return true;
}

bool check_weakly_separable(const FiniteGame& game) {
  // Quantifier brute force over (i, t, o_i, o_i', o_-i, o_-i').
  const int n = game.n();
  for (int i = 0; i < n; ++i) {
    const int K = game.num_outcomes(i);
    // Enumerate rival profiles by iterating full profiles with slot i fixed 0.
    std::vector<OutcomeProfile> rivals;
    for (long long pi = 0; pi < game.profile_count(); ++pi) {
      OutcomeProfile o = game.profile_at(pi);
      if (o[i] != 0) continue;
      rivals.push_back(o);
    }
    for (int t = 0; t < game.num_types(); ++t)
      for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b) {
          if (a == b) continue;
          for (const auto& r1 : rivals)
            for (const auto& r2 : rivals) {
              OutcomeProfile x = r1, y = r1, u = r2, v = r2;
              x[i] = a;
              y[i] = b;
              u[i] = a;
              v[i] = b;
              if (game.agent_value(x, t) > game.agent_value(y, t) &&
                  !(game.agent_value(u, t) > game.agent_value(v, t)))
                return false;
            }
        }
  }
  return true;
}

}  // namespace

SufficiencyFlags check_sufficiency(const FiniteGame& game,
                                   const std::optional<MenuProfile>& profile,
                                   const std::vector<DirectMechanism>* mechanisms) {
  SufficiencyFlags flags;
  const int T = game.num_types();

  auto distinct_over = [&](const std::vector<OutcomeProfile>& profiles) {
    for (int t = 0; t < T; ++t)
      for (size_t a = 0; a < profiles.size(); ++a)
        for (size_t b = a + 1; b < profiles.size(); ++b)
          if (game.agent_value(profiles[a], t) == game.agent_value(profiles[b], t)) return false;
    return true;
  };

  {
    std::vector<OutcomeProfile> all;
    for (long long pi = 0; pi < game.profile_count(); ++pi) all.push_back(game.profile_at(pi));
    flags.non_indifference_global = distinct_over(all);
  }

  if (profile) {
    std::vector<OutcomeProfile> in_menus;
    for (long long pi = 0; pi < game.profile_count(); ++pi) {
      OutcomeProfile o = game.profile_at(pi);
      bool inside = true;
      for (int i = 0; i < game.n(); ++i)
        if (!((*profile)[i] >> o[i] & 1)) inside = false;
      if (inside) in_menus.push_back(std::move(o));
    }
    flags.non_indifference_profile = distinct_over(in_menus);
    int singletons = 0;
    for (int i = 0; i < game.n(); ++i)
      if (menu_size((*profile)[i]) == 1) ++singletons;
    flags.singleton_structure = singletons >= game.n() - 1;
  }

  AdditiveDecomposition dec;
  flags.additive_separable = check_additive(game, &dec);
  if (flags.additive_separable) flags.decomposition = std::move(dec);
  flags.weakly_separable = flags.additive_separable || check_weakly_separable(game);

  if (mechanisms && game.outside == OutsideKind::intrinsic) {
    std::vector<std::vector<char>> quit_set(mechanisms->size());
    bool aligned = true;
    for (size_t k = 0; k < mechanisms->size(); ++k) {
      quit_set[k].resize(T);
      for (int t = 0; t < T; ++t)
        quit_set[k][t] = (*mechanisms)[k].assignment[t] == kQuit;
      if (k > 0 && quit_set[k] != quit_set[0]) aligned = false;
    }
    flags.quit_alignment = aligned;
  }
  return flags;
}

ProfileSearchResult find_p3_induced_profiles(const FiniteGame& game, long long profile_bound,
                                             int cap) {
  ProfileSearchResult result;
  long long combos = 1;
  for (int i = 0; i < game.n(); ++i) {
    combos *= (1LL << game.num_outcomes(i)) - 1;
    if (combos > profile_bound) {
      result.bound_exceeded = true;
      result.error = "menu-profile space exceeds the bound; use best-response iteration";
      return result;
    }
  }

  std::map<std::pair<int, MenuProfile>, ScreeningSolution> cache;
  auto solve_for = [&](int i, const MenuProfile& menus) -> const ScreeningSolution& {
    MenuProfile rivals = menus;
    rivals[i] = 0;
    auto key = std::make_pair(i, rivals);
    auto it = cache.find(key);
    if (it == cache.end()) {
      ScreeningProblem problem;
      problem.game = &game;
      problem.principal = i;
      problem.rival_menus = menus;
      it = cache.emplace(key, solve_screening(problem)).first;
    }
    return it->second;
  };

  // Enumerate menu profiles in canonical order.
  std::vector<std::vector<Menu>> options(game.n());
  for (int i = 0; i < game.n(); ++i) {
    for (Menu s = 1; s <= game.full_menu(i); ++s) options[i].push_back(s);
    std::sort(options[i].begin(), options[i].end(), [](Menu a, Menu b) {
      int pa = menu_size(a), pb = menu_size(b);
      if (pa != pb) return pa < pb;
      return menu_elements(a) < menu_elements(b);
    });
  }
  std::vector<size_t> pos(game.n(), 0);
  for (;;) {
    MenuProfile menus(game.n());
    for (int i = 0; i < game.n(); ++i) menus[i] = options[i][pos[i]];

    std::vector<std::vector<DirectMechanism>> per_principal(game.n());
    bool mutual = true;
    for (int i = 0; i < game.n() && mutual; ++i) {
      const ScreeningSolution& sol = solve_for(i, menus);
      if (!sol.feasible) {
        mutual = false;
        break;
      }
      if (sol.truncated) result.truncated = true;
      for (const auto& m : sol.mechanisms)
        if (m.induced_menu() == menus[i]) per_principal[i].push_back(m);
      if (per_principal[i].empty()) mutual = false;
    }

    if (mutual) {
      // Every combination of per-principal optimal mechanisms with these
      // ranges is a mutual fixed point; report each with its compatibility
      // verdict.
      std::vector<size_t> mix(game.n(), 0);
      for (;;) {
        if (static_cast<int>(result.profiles.size()) >= cap) {
          result.truncated = true;
          break;
        }
        MutualProfile mp;
        for (int i = 0; i < game.n(); ++i) mp.mechanisms.push_back(per_principal[i][mix[i]]);
        mp.menus = menus;
        CompatibilityVariant variant = CompatibilityVariant::upr;
        if (game.outside == OutsideKind::intrinsic) variant = CompatibilityVariant::upr_i;
        if (game.outside == OutsideKind::delegated) variant = CompatibilityVariant::upr_d;
        mp.compatibility = check_compatibility(game, mp.mechanisms, variant);
        result.profiles.push_back(std::move(mp));
        int i = 0;
        while (i < game.n() && ++mix[i] == per_principal[i].size()) mix[i++] = 0;
        if (i == game.n()) break;
      }
      if (static_cast<int>(result.profiles.size()) >= cap) break;
    }

    int i = 0;
    while (i < game.n() && ++pos[i] == options[i].size()) pos[i++] = 0;
    if (i == game.n()) break;
  }
  return result;
}

IterationResult best_response_iteration(const FiniteGame& game, const MenuProfile& start,
                                        int max_rounds) {
  IterationResult result;
  MenuProfile current = start;
  result.trajectory.push_back(current);

  for (int round = 0; round < max_rounds; ++round) {
    MenuProfile before = current;
    for (int i = 0; i < game.n(); ++i) {
      ScreeningProblem problem;
      problem.game = &game;
      problem.principal = i;
      problem.rival_menus = current;
      ScreeningSolution sol = solve_screening(problem);
      if (!sol.feasible || sol.menus.empty()) continue;
      current[i] = sol.menus.front();  // canonical minimal-menu optimum
    }
    auto seen = std::find(result.trajectory.begin(), result.trajectory.end(), current);
    if (current == before) {
      result.fixed_point = true;
      return result;
    }
    if (seen != result.trajectory.end()) {
      result.trajectory.push_back(current);
      result.cycle = true;
      result.cycle_start = static_cast<int>(seen - result.trajectory.begin());
      return result;
    }
    result.trajectory.push_back(current);
  }
  return result;
}

Classification classify_pbe(const FiniteGame& game, const MenuProfile& profile,
                            const AgentStrategy& strategy, bool strict) {
  Classification cls;
  SufficiencyFlags flags = check_sufficiency(game, profile);
  if (!flags.non_indifference_global) {
    if (strict) {
      cls.refusal = "the non-indifference hypothesis fails; classification refused";
      return cls;
    }
    cls.heuristic = true;
  }
  cls.applicable = true;

  const int T = game.num_types();
  for (int i = 0; i < game.n(); ++i) {
    for (int o : menu_elements(profile[i])) {
      bool chosen = false;
      for (int t = 0; t < T && !chosen; ++t) {
        auto dist = resolve_choice(game, strategy, profile, t);
        if (!dist) throw GameFormatError("strategy undefined at the on-path profile");
        for (const auto& [choice, w] : dist->atoms)
          if (!choice.quit && choice.outcome[i] == o) chosen = true;
      }
      if (!chosen) cls.unused_items.emplace_back(i, o);
    }
  }
  cls.p3_induced = cls.unused_items.empty();
  return cls;
}

ParetoResult pareto_compare(const FiniteGame& game, const std::vector<ParetoEntry>& entries) {
  ParetoResult result;
  for (const auto& e : entries) {
    std::vector<Rational> pay(game.n());
    for (int i = 0; i < game.n(); ++i)
      pay[i] = expected_principal_payoff(game, i, *e.strategy, e.profile);
    result.payoff.push_back(std::move(pay));
  }
  const int m = static_cast<int>(entries.size());
  std::vector<char> dominated(m, 0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      if (a == b) continue;
      bool weak = true, strict = false;
      for (int i = 0; i < game.n(); ++i) {
        if (result.payoff[a][i] < result.payoff[b][i]) weak = false;
        if (result.payoff[a][i] > result.payoff[b][i]) strict = true;
      }
      if (weak && strict) {
        result.dominance.emplace_back(a, b);
        dominated[b] = 1;
      }
    }
  for (int a = 0; a < m; ++a)
    if (!dominated[a]) result.frontier.push_back(a);

  result.singleton_type_case = game.num_types() == 1;
  if (game.n() == 2 && game.independent_payoffs) {
    for (int i = 0; i < game.n() && !result.type_independent_peaked; ++i) {
      // argmax_o u_i(o, t) must be the same singleton for every type.
      std::vector<int> best;
      bool constant = true;
      for (int t = 0; t < game.num_types(); ++t) {
        Rational top = game.own_value(i, 0, t);
        std::vector<int> arg{0};
        for (int o = 1; o < game.num_outcomes(i); ++o) {
          const Rational& v = game.own_value(i, o, t);
          if (v > top) {
            top = v;
            arg.assign(1, o);
          } else if (v == top) {
            arg.push_back(o);
          }
        }
        if (arg.size() != 1) constant = false;
        if (t == 0) best = arg;
        else if (arg != best) constant = false;
        if (!constant) break;
      }
      if (constant) result.type_independent_peaked = i;
    }
  }
  return result;
}

}  // namespace comag
