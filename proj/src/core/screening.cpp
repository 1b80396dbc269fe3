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

#include "core/screening.hpp"

#include <algorithm>
#include <limits>

#include "core/verifier.hpp"

namespace comag {

namespace {

// Cardinality first, then lexicographic on the element lists, so the first
// optimum reported is the minimal-menu one.
bool menu_order_less(Menu a, Menu b) {
  const int pa = menu_size(a), pb = menu_size(b);
  if (pa != pb) return pa < pb;
  while (a && b) {
    const int ea = __builtin_ctzll(a), eb = __builtin_ctzll(b);
    if (ea != eb) return ea < eb;
    a &= a - 1;
    b &= b - 1;
  }
  return false;
}

std::vector<Menu> ordered_candidate_menus(const FiniteGame& game, int principal) {
  const Menu full = game.full_menu(principal);
  std::vector<Menu> menus;
  menus.reserve(full);
  for (Menu s = 1; s <= full; ++s) menus.push_back(s);
  std::sort(menus.begin(), menus.end(), menu_order_less);
  return menus;
}

IndirectUtilityTable build_table(const ScreeningProblem& p) {
  MenuProfile rivals = p.rival_menus;
  rivals.resize(p.game->n());
  if (p.game->outside == OutsideKind::delegated) rivals = augment_with_outside(*p.game, rivals);
  return indirect_utility(*p.game, p.principal, rivals);
}

Rational choice_payoff(const FiniteGame& game, int i, int choice, int t) {
  if (choice == kQuit) return Rational(0);
  return game.own_value(i, choice, t);
}

// All value-optimal mechanisms with range exactly `candidate`, by DFS over
// per-type choice rows. Rows must already be restricted to payoff-best
// choices for positive-probability types.
void enumerate_range_exact(const std::vector<std::vector<int>>& rows, Menu candidate, int cap,
                           int principal, std::vector<DirectMechanism>* out, bool* truncated) {
  const int T = static_cast<int>(rows.size());
  // Suffix unions for coverage pruning.
  std::vector<Menu> suffix(T + 1, 0);
  for (int t = T - 1; t >= 0; --t) {
    suffix[t] = suffix[t + 1];
    for (int o : rows[t])
      if (o != kQuit) suffix[t] |= Menu{1} << o;
  }
  std::vector<int> pick(T);
  auto dfs = [&](auto&& self, int t, Menu covered) -> void {
    if (*truncated) return;
    if ((covered | suffix[t]) != ((covered | suffix[t]) | candidate)) return;  // can't cover
    if (t == T) {
      if (covered == candidate) {
        if (static_cast<int>(out->size()) >= cap) {
          *truncated = true;
          return;
        }
        DirectMechanism m;
        m.principal = principal;
        m.assignment = pick;
        out->push_back(std::move(m));
      }
      return;
    }
    for (int o : rows[t]) {
      pick[t] = o;
      Menu next = covered;
      if (o != kQuit) next |= Menu{1} << o;
      self(self, t + 1, next);
    }
  };
  dfs(dfs, 0, 0);
}

}  // namespace

std::optional<MenuRows> menu_agent_rows(const ScreeningProblem& problem,
                                        const IndirectUtilityTable& table, Menu candidate) {
  const FiniteGame& game = *problem.game;
  const int T = game.num_types();
  const auto elements = menu_elements(candidate);
  MenuRows rows;
  rows.agent_rows.resize(T);
  rows.row_value.resize(T);

  for (int t = 0; t < T; ++t) {
    Rational best;
    bool first = true;
    for (int o : elements) {
      const Rational& v = table.at(o, t).value;
      if (first || v > best) {
        best = v;
        first = false;
      }
    }
    std::vector<int> row;
    if (!first)
      for (int o : elements)
        if (table.at(o, t).value == best) row.push_back(o);

    switch (game.outside) {
      case OutsideKind::none:
        if (first) return std::nullopt;  // empty menu without a quit escape
        rows.row_value[t] = best;
        break;
      case OutsideKind::delegated: {
        if (first) return std::nullopt;
        const Rational& reserve = table.at(game.outside_option[problem.principal], t).value;
        if (best < reserve) return std::nullopt;  // IR fails for this type
        rows.row_value[t] = best;
        break;
      }
      case OutsideKind::intrinsic: {
        if (first || best < 0) {
          row.assign(1, kQuit);
          rows.row_value[t] = 0;
        } else if (best == 0) {
          row.push_back(kQuit);
          rows.row_value[t] = 0;
        } else {
          rows.row_value[t] = best;
        }
        break;
      }
    }
    rows.agent_rows[t] = std::move(row);
  }
  return rows;
}

std::optional<DirectMechanism> optimal_for_menu(const ScreeningProblem& problem, Menu candidate) {
  const FiniteGame& game = *problem.game;
  IndirectUtilityTable table = build_table(problem);
  auto rows = menu_agent_rows(problem, table, candidate);
  if (!rows) return std::nullopt;

  DirectMechanism mech;
  mech.principal = problem.principal;
  mech.assignment.resize(game.num_types());
  for (int t = 0; t < game.num_types(); ++t) {
    // Principal-favorable, then items before quit, then lexicographic.
    int best_choice = rows->agent_rows[t].front();
    Rational best_pay = choice_payoff(game, problem.principal, best_choice, t);
    for (int choice : rows->agent_rows[t]) {
      Rational pay = choice_payoff(game, problem.principal, choice, t);
      bool better = pay > best_pay;
      if (pay == best_pay) {
        if (best_choice == kQuit && choice != kQuit) better = true;
        else if (choice != kQuit && best_choice != kQuit && choice < best_choice) better = true;
      }
      if (better) {
        best_pay = pay;
        best_choice = choice;
      }
    }
    mech.assignment[t] = best_choice;
  }
  if (mech.induced_menu() != candidate) return std::nullopt;  // range deficit
  return mech;
}

// Integer ranks of a per-type value row, so that the menu-enumeration loop
// compares ints instead of rationals.
struct RankedRows {
  int num_outcomes = 0, num_types = 0;
  std::vector<int> vrank;      // [o * T + t]
  std::vector<int> urank;      // [o * T + t]
  std::vector<int> vrank_zero; // per type: rank of the value 0 in the v row
  std::vector<int> vrank_reserve;  // per type: rank of the delegated IR threshold
  std::vector<Rational> pay;   // [o * T + t]: u_i(o, t), fetched by index

  int v(int o, int t) const { return vrank[static_cast<size_t>(o) * num_types + t]; }
  int u(int o, int t) const { return urank[static_cast<size_t>(o) * num_types + t]; }
};

RankedRows rank_rows(const FiniteGame& game, int i, const IndirectUtilityTable& table) {
  RankedRows r;
  r.num_outcomes = game.num_outcomes(i);
  r.num_types = game.num_types();
  const int T = r.num_types;
  r.vrank.resize(static_cast<size_t>(r.num_outcomes) * T);
  r.urank.resize(r.vrank.size());
  r.pay.resize(r.vrank.size());
  r.vrank_zero.resize(T);
  r.vrank_reserve.assign(T, -1);

  std::vector<std::pair<Rational, int>> row(r.num_outcomes);
  for (int t = 0; t < T; ++t) {
    for (int o = 0; o < r.num_outcomes; ++o) row[o] = {table.at(o, t).value, o};
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    int rank = 0;
    for (int k = 0; k < r.num_outcomes; ++k) {
      if (k > 0 && row[k].first != row[k - 1].first) ++rank;
      r.vrank[static_cast<size_t>(row[k].second) * T + t] = rank;
    }
    // Rank of zero: strictly between neighbouring value ranks; encode on a
    // doubled scale so ties remain exact. v-ranks above are doubled too.
    for (int o = 0; o < r.num_outcomes; ++o)
      r.vrank[static_cast<size_t>(o) * T + t] *= 2;
    int zero_rank = -1;  // below everything
    for (int k = 0; k < r.num_outcomes; ++k) {
      if (row[k].first < 0) zero_rank = r.vrank[static_cast<size_t>(row[k].second) * T + t] + 1;
      if (row[k].first == 0) zero_rank = r.vrank[static_cast<size_t>(row[k].second) * T + t];
    }
    r.vrank_zero[t] = zero_rank;
    if (game.outside == OutsideKind::delegated)
      r.vrank_reserve[t] =
          r.vrank[static_cast<size_t>(game.outside_option[i]) * T + t];

    for (int o = 0; o < r.num_outcomes; ++o) row[o] = {game.own_value(i, o, t), o};
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    rank = 0;
    for (int k = 0; k < r.num_outcomes; ++k) {
      if (k > 0 && row[k].first != row[k - 1].first) ++rank;
      r.urank[static_cast<size_t>(row[k].second) * T + t] = rank;
    }
    for (int o = 0; o < r.num_outcomes; ++o)
      r.pay[static_cast<size_t>(o) * T + t] = game.own_value(i, o, t);
  }
  return r;
}

ScreeningSolution solve_screening(const ScreeningProblem& problem) {
  if (problem.form == ObjectiveForm::general_with_strategy)
    return solve_screening_general(problem);

  const FiniteGame& game = *problem.game;
  if (!game.independent_payoffs)
    throw GameFormatError(
        "independent-form screening needs independent payoffs; use the strategy-routed form");
  const int i = problem.principal;
  const int T = game.num_types();
  const bool intrinsic = game.outside == OutsideKind::intrinsic;
  const bool delegated = game.outside == OutsideKind::delegated;
  IndirectUtilityTable table = build_table(problem);
  RankedRows ranks = rank_rows(game, i, table);

  std::vector<Menu> candidates = ordered_candidate_menus(game, i);
  if (intrinsic) candidates.insert(candidates.begin(), Menu{0});  // the all-quit mechanism

  // Scale the per-(outcome, type) payoff contributions to one common
  // denominator so the enumeration accumulates plain integers.
  BigInt common_den = 1;
  for (int t = 0; t < T; ++t)
    for (int o = 0; o < game.num_outcomes(i); ++o) {
      Rational c = game.type_prob[t] * ranks.pay[static_cast<size_t>(o) * T + t];
      BigInt den = denominator(c);
      common_den = common_den / gcd(common_den, den) * den;
    }
  std::vector<BigInt> contrib(static_cast<size_t>(game.num_outcomes(i)) * T);
  for (int t = 0; t < T; ++t)
    for (int o = 0; o < game.num_outcomes(i); ++o) {
      Rational c = game.type_prob[t] * ranks.pay[static_cast<size_t>(o) * T + t];
      contrib[static_cast<size_t>(o) * T + t] =
          numerator(c) * (common_den / denominator(c));
    }

  // Pass 1: per-menu value by integer-rank scans; remember the argmax menus.
  bool any_feasible = false;
  BigInt best_num;
  std::vector<Menu> best_menus;
  std::vector<int> pick(T);  // best choice index per type; kQuit allowed

  for (Menu s : candidates) {
    BigInt value = 0;
    bool feasible = true;
    for (int t = 0; t < T && feasible; ++t) {
      int best_v = std::numeric_limits<int>::min();
      int best_u = std::numeric_limits<int>::min();
      int choice = kQuit;
      for (Menu rest = s; rest; rest &= rest - 1) {
        const int o = __builtin_ctzll(rest);
        const int v = ranks.v(o, t);
        if (v > best_v) {
          best_v = v;
          best_u = ranks.u(o, t);
          choice = o;
        } else if (v == best_v) {
          const int u = ranks.u(o, t);
          if (u > best_u) {
            best_u = u;
            choice = o;
          }
        }
      }
      if (intrinsic) {
        if (choice == kQuit || best_v < ranks.vrank_zero[t]) {
          pick[t] = kQuit;
          continue;  // forced (or empty-menu) quit contributes 0
        }
        if (best_v == ranks.vrank_zero[t] &&
            ranks.pay[static_cast<size_t>(choice) * T + t] < 0) {
          pick[t] = kQuit;  // payoff-equal escape: the principal prefers quit
          continue;
        }
      } else {
        if (choice == kQuit) {
          feasible = false;
          break;
        }
        if (delegated && best_v < ranks.vrank_reserve[t]) {
          feasible = false;  // IR fails for this type
          break;
        }
      }
      pick[t] = choice;
      value += contrib[static_cast<size_t>(choice) * T + t];
    }
    if (!feasible) continue;
    if (!any_feasible || value > best_num) {
      best_num = value;
      best_menus.clear();
    }
    if (value == best_num) best_menus.push_back(s);
    any_feasible = true;
  }

  ScreeningSolution solution;
  if (!any_feasible) {
    solution.feasible = false;
    return solution;
  }
  solution.optimal_value = Rational(best_num, common_den);

  // Pass 2: reconstruct the full best-choice rows for the argmax menus only
  // and enumerate every selection whose range matches. A rank-level coverage
  // scan discards menus whose best choices cannot reproduce the range.
  auto coverable = [&](Menu s) {
    Menu covered = 0;
    for (int t = 0; t < T; ++t) {
      int best_v = std::numeric_limits<int>::min();
      int best_u = std::numeric_limits<int>::min();
      Menu row = 0;
      for (Menu rest = s; rest; rest &= rest - 1) {
        const int o = __builtin_ctzll(rest);
        const int v = ranks.v(o, t);
        const int u = ranks.u(o, t);
        if (v > best_v) {
          best_v = v;
          best_u = u;
          row = Menu{1} << o;
        } else if (v == best_v) {
          if (game.type_prob[t] == 0 || u == best_u) {
            row |= Menu{1} << o;
          } else if (u > best_u) {
            best_u = u;
            row = Menu{1} << o;
          }
        }
      }
      if (intrinsic && best_v < ranks.vrank_zero[t]) continue;  // quit row
      covered |= row;
    }
    return (covered & s) == s;
  };
  for (Menu s : best_menus) {
    if (static_cast<int>(solution.mechanisms.size()) >= problem.solution_cap) {
      solution.truncated = true;
      break;
    }
    if (!coverable(s)) continue;
    auto rows = menu_agent_rows(problem, table, s);
    if (!rows) continue;
    std::vector<std::vector<int>> best_rows(T);
    for (int t = 0; t < T; ++t) {
      if (game.type_prob[t] == 0) {
        best_rows[t] = rows->agent_rows[t];  // payoff-irrelevant type
        continue;
      }
      Rational best_pay;
      bool first = true;
      for (int choice : rows->agent_rows[t]) {
        Rational pay = choice_payoff(game, i, choice, t);
        if (first || pay > best_pay) {
          best_pay = pay;
          first = false;
        }
      }
      for (int choice : rows->agent_rows[t])
        if (choice_payoff(game, i, choice, t) == best_pay) best_rows[t].push_back(choice);
    }
    enumerate_range_exact(best_rows, s, problem.solution_cap, i, &solution.mechanisms,
                          &solution.truncated);
  }
  for (const auto& m : solution.mechanisms) solution.menus.push_back(m.induced_menu());
  return solution;
}

ScreeningSolution solve_screening_general(const ScreeningProblem& problem) {
  const FiniteGame& game = *problem.game;
  if (game.outside != OutsideKind::none)
    throw GameFormatError("general-payoff screening supports plain mode only");
  if (problem.strategy == nullptr)
    throw GameFormatError("general-payoff screening requires an agent strategy");
  const int i = problem.principal;
  const int T = game.num_types();
  IndirectUtilityTable table = build_table(problem);

  std::vector<Menu> candidates = ordered_candidate_menus(game, i);

  // The strategy must be pure and defined at each candidate profile, and the
  // family must satisfy menu-shrinkage consistency.
  std::vector<MenuProfile> lattice;
  for (Menu s : candidates) {
    MenuProfile node = problem.rival_menus;
    node.resize(game.n());
    node[i] = s;
    lattice.push_back(std::move(node));
  }
  for (const auto& node : lattice)
    for (int t = 0; t < T; ++t) {
      auto dist = resolve_choice(game, *problem.strategy, node, t);
      if (!dist) throw GameFormatError("agent strategy undefined at a candidate profile");
      if (!dist->is_pure())
        throw GameFormatError("general-payoff screening requires a pure agent strategy");
    }
  IiaReport iia = check_iia(game, *problem.strategy, IiaVariant::iia1, lattice);
  if (!iia.pass)
    throw GameFormatError("agent strategy violates menu-shrinkage consistency (IIA-1)");

  struct Scored {
    Menu menu;
    Rational value;
    std::vector<std::vector<int>> rows;
  };
  std::vector<Scored> scored;
  bool any_feasible = false;
  Rational best_value;

  for (size_t k = 0; k < candidates.size(); ++k) {
    Menu s = candidates[k];
    auto rows = menu_agent_rows(problem, table, s);
    if (!rows) continue;
    // Feasibility means some IC selection covers S exactly.
    std::vector<DirectMechanism> probe;
    bool trunc = false;
    enumerate_range_exact(rows->agent_rows, s, 1, i, &probe, &trunc);
    if (probe.empty()) continue;

    Rational value = 0;
    for (int t = 0; t < T; ++t) {
      auto dist = resolve_choice(game, *problem.strategy, lattice[k], t);
      value += game.type_prob[t] * dist_principal_payoff(game, i, *dist, t);
    }
    if (!any_feasible || value > best_value) best_value = value;
    any_feasible = true;
    scored.push_back(Scored{s, std::move(value), std::move(rows->agent_rows)});
  }

  ScreeningSolution solution;
  if (!any_feasible) {
    solution.feasible = false;
    return solution;
  }
  solution.optimal_value = best_value;
  for (const Scored& sc : scored) {
    if (sc.value != best_value) continue;
    if (static_cast<int>(solution.mechanisms.size()) >= problem.solution_cap) {
      solution.truncated = true;
      break;
    }
    enumerate_range_exact(sc.rows, sc.menu, problem.solution_cap, i, &solution.mechanisms,
                          &solution.truncated);
  }
  for (const auto& m : solution.mechanisms) solution.menus.push_back(m.induced_menu());
  return solution;
}

}  // namespace comag
