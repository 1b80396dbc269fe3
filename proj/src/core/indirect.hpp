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

#ifndef COMAG_CORE_INDIRECT_HPP_
#define COMAG_CORE_INDIRECT_HPP_

#include <vector>

#include "core/game.hpp"

namespace comag {

// One cell of an indirect-utility table: the envelope value together with
// every rival selection attaining it (all maximizers, not just one, so that
// compatibility checking can search over agent-optimal recombinations).
struct IndirectEntry {
  Rational value;
  std::vector<OutcomeProfile> witnesses;  // rival profiles; slot [principal] = -1
};

// The agent's best payoff over rivals' menu selections, per own outcome and
// type. Immutable once built; shares nothing mutable.
struct IndirectUtilityTable {
  int principal = 0;
  MenuProfile rival_menus;  // slot [principal] unused (0)
  int num_types = 0;
  int num_own_outcomes = 0;
  bool has_quit_row = false;           // intrinsic outside options
  std::vector<IndirectEntry> entries;  // [o_i * num_types + t]

  const IndirectEntry& at(int o_i, int t) const;  // o_i == kQuit hits the quit row
};

struct WeightedRivalMenus {
  MenuProfile rival_menus;
  Rational weight;
};

// Def.-(1)-style envelope of V over the rivals' menu product, for each own
// outcome and type. Rival menus must be nonempty.
IndirectUtilityTable indirect_utility(const FiniteGame& game, int principal,
                                      const MenuProfile& rival_menus);

// Envelope against a stochastic rival menu profile: entry values are the
// weight-averaged per-profile envelope values. Witnesses are not tracked in
// the mixed form.
IndirectUtilityTable indirect_utility_mixed(const FiniteGame& game, int principal,
                                            const std::vector<WeightedRivalMenus>& mixture);

}  // namespace comag

#endif  // COMAG_CORE_INDIRECT_HPP_
