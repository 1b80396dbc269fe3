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

#include "core/indirect.hpp"

namespace comag {

namespace {

const IndirectEntry kQuitEntry{Rational(0), {}};

// Enumerates rival outcome combinations for `principal` given rival menus.
template <typename Fn>
void for_each_rival_profile(const FiniteGame& game, int principal, const MenuProfile& rivals,
                            Fn&& fn) {
  const int n = game.n();
  std::vector<std::vector<int>> items(n);
  for (int j = 0; j < n; ++j) {
    if (j == principal) continue;
    items[j] = menu_elements(rivals[j]);
    if (items[j].empty()) throw GameFormatError("rival menu must be nonempty");
  }
  OutcomeProfile o(n, -1);
  std::vector<int> pos(n, 0);
  for (;;) {
    for (int j = 0; j < n; ++j)
      if (j != principal) o[j] = items[j][pos[j]];
    fn(o);
    int j = 0;
    while (j < n) {
      if (j == principal) {
        ++j;
        continue;
      }
      if (++pos[j] < static_cast<int>(items[j].size())) break;
      pos[j++] = 0;
    }
    if (j == n) break;
  }
}

}  // namespace

const IndirectEntry& IndirectUtilityTable::at(int o_i, int t) const {
  if (o_i == kQuit) {
    if (!has_quit_row) throw GameFormatError("quit row requested on a table without one");
    return entries[static_cast<size_t>(num_own_outcomes) * num_types + t];
  }
  return entries[static_cast<size_t>(o_i) * num_types + t];
}

IndirectUtilityTable indirect_utility(const FiniteGame& game, int principal,
                                      const MenuProfile& rival_menus) {
  IndirectUtilityTable table;
  table.principal = principal;
  table.rival_menus = rival_menus;
  table.rival_menus.resize(game.n());
  table.rival_menus[principal] = 0;
  table.num_types = game.num_types();
  table.num_own_outcomes = game.num_outcomes(principal);
  table.has_quit_row = game.outside == OutsideKind::intrinsic;
  const int rows = table.num_own_outcomes + (table.has_quit_row ? 1 : 0);
  table.entries.resize(static_cast<size_t>(rows) * table.num_types);

  for (int o_i = 0; o_i < table.num_own_outcomes; ++o_i) {
    for (int t = 0; t < table.num_types; ++t) {
      IndirectEntry& cell = table.entries[static_cast<size_t>(o_i) * table.num_types + t];
      bool first = true;
      for_each_rival_profile(game, principal, table.rival_menus, [&](const OutcomeProfile& rp) {
        OutcomeProfile full = rp;
        full[principal] = o_i;
        const Rational& v = game.agent_value(full, t);
        if (first || v > cell.value) {
          cell.value = v;
          cell.witnesses.clear();
          first = false;
        }
        if (v == cell.value) {
          OutcomeProfile witness = rp;  // keep slot [principal] = -1
          cell.witnesses.push_back(std::move(witness));
        }
      });
    }
  }
  if (table.has_quit_row)
    for (int t = 0; t < table.num_types; ++t)
      table.entries[static_cast<size_t>(table.num_own_outcomes) * table.num_types + t] =
          kQuitEntry;
  return table;
}

IndirectUtilityTable indirect_utility_mixed(const FiniteGame& game, int principal,
                                            const std::vector<WeightedRivalMenus>& mixture) {
  Rational total = 0;
  for (const auto& m : mixture) total += m.weight;
  if (total != 1) throw GameFormatError("mixture weights sum to " + rat_to_string(total));

  IndirectUtilityTable table;
  table.principal = principal;
  table.rival_menus.assign(game.n(), 0);
  table.num_types = game.num_types();
  table.num_own_outcomes = game.num_outcomes(principal);
  table.has_quit_row = game.outside == OutsideKind::intrinsic;
  const int rows = table.num_own_outcomes + (table.has_quit_row ? 1 : 0);
  table.entries.resize(static_cast<size_t>(rows) * table.num_types);

  for (const auto& m : mixture) {
    IndirectUtilityTable part = indirect_utility(game, principal, m.rival_menus);
    for (int o_i = 0; o_i < table.num_own_outcomes; ++o_i)
      for (int t = 0; t < table.num_types; ++t)
        table.entries[static_cast<size_t>(o_i) * table.num_types + t].value +=
            m.weight * part.at(o_i, t).value;
  }
  return table;
}

}  // namespace comag
