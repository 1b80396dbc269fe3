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

#ifndef COMAG_CORE_SCREENING_HPP_
#define COMAG_CORE_SCREENING_HPP_

#include <optional>
#include <vector>

#include "core/game.hpp"
#include "core/indirect.hpp"

namespace comag {

enum class ObjectiveForm { independent, general_with_strategy };

// One principal's single-principal screening program against fixed rival
// menus. The outside-option mode comes from the game itself.
struct ScreeningProblem {
  const FiniteGame* game = nullptr;
  int principal = 0;
  MenuProfile rival_menus;  // slot [principal] ignored
  ObjectiveForm form = ObjectiveForm::independent;
  const AgentStrategy* strategy = nullptr;  // required for general_with_strategy
  int solution_cap = 64;
};

struct ScreeningSolution {
  Rational optimal_value;
  std::vector<DirectMechanism> mechanisms;  // every optimal mechanism, capped
  std::vector<Menu> menus;                  // induced menu per mechanism
  bool truncated = false;
  bool feasible = true;  // false only when no mechanism satisfies IC/IR at all
};

// Candidate-menu enumeration: for each nonempty S (plus the all-quit menu
// under intrinsic options), incentive compatibility pins the agent-optimal
// rows, the principal-favorable element is taken within each row, the range
// must reproduce S, and IR rows are enforced per mode. Maximum over S.
ScreeningSolution solve_screening(const ScreeningProblem& problem);

// The principal-favorably tie-broken selection for a single candidate menu,
// or nullopt when the range misses part of S or IR fails.
std::optional<DirectMechanism> optimal_for_menu(const ScreeningProblem& problem, Menu candidate);

// General-payoff variant: the objective routes through the supplied agent
// strategy, so it depends on the candidate menu only. Plain mode only.
ScreeningSolution solve_screening_general(const ScreeningProblem& problem);

// Shared helper: the candidate menu's per-type feasible choice rows under the
// problem's mode, or nullopt when the menu is infeasible (an IR-violating
// type with no quit escape). Row entries are outcome indices, kQuit allowed.
struct MenuRows {
  std::vector<std::vector<int>> agent_rows;  // per type: agent-optimal choices
  std::vector<Rational> row_value;           // agent's value at each type
};
std::optional<MenuRows> menu_agent_rows(const ScreeningProblem& problem,
                                        const IndirectUtilityTable& table, Menu candidate);

}  // namespace comag

#endif  // COMAG_CORE_SCREENING_HPP_
