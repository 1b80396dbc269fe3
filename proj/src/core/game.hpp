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

#ifndef COMAG_CORE_GAME_HPP_
#define COMAG_CORE_GAME_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core/rational.hpp"

namespace comag {

// Sentinel used in mechanism assignments under intrinsic outside options.
inline constexpr int kQuit = -1;

// A menu is a bitmask over one principal's outcome indices.
using Menu = std::uint64_t;
using MenuProfile = std::vector<Menu>;
using OutcomeProfile = std::vector<int>;  // one outcome index per principal

enum class OutsideKind { none, intrinsic, delegated };

struct GameFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Finite common-agency game with exact rational payoffs. Immutable after
// load; safe for concurrent reads.
struct FiniteGame {
  std::vector<std::string> principals;
  std::vector<std::vector<std::string>> outcome_labels;  // [principal][outcome]
  std::vector<std::string> type_labels;
  std::vector<Rational> type_prob;
  bool independent_payoffs = true;
  OutsideKind outside = OutsideKind::none;
  std::vector<int> outside_option;  // per principal; delegated mode only

  // Flattened tables; profile indices are mixed-radix with principal 0 as the
  // fastest-varying digit.
  std::vector<Rational> agent_table;  // [profile * num_types + t]
  // Independent mode: [i][o_i * num_types + t]. General: [i][profile * num_types + t].
  std::vector<std::vector<Rational>> principal_table;

  int n() const { return static_cast<int>(principals.size()); }
  int num_types() const { return static_cast<int>(type_labels.size()); }
  int num_outcomes(int i) const { return static_cast<int>(outcome_labels[i].size()); }

  long long profile_count() const {
    long long c = 1;
    for (int i = 0; i < n(); ++i) c *= num_outcomes(i);
    return c;
  }

  long long profile_index(const OutcomeProfile& o) const {
    long long idx = 0, radix = 1;
    for (int i = 0; i < n(); ++i) {
      idx += o[i] * radix;
      radix *= num_outcomes(i);
    }
    return idx;
  }

  OutcomeProfile profile_at(long long idx) const {
    OutcomeProfile o(n());
    for (int i = 0; i < n(); ++i) {
      o[i] = static_cast<int>(idx % num_outcomes(i));
      idx /= num_outcomes(i);
    }
    return o;
  }

  const Rational& agent_value(const OutcomeProfile& o, int t) const {
    return agent_table[profile_index(o) * num_types() + t];
  }

  // Principal i's payoff at a full outcome profile.
  const Rational& principal_value(int i, const OutcomeProfile& o, int t) const {
    if (independent_payoffs)
      return principal_table[i][static_cast<long long>(o[i]) * num_types() + t];
    return principal_table[i][profile_index(o) * num_types() + t];
  }

  // Independent mode only: payoff from own outcome.
  const Rational& own_value(int i, int o_i, int t) const {
    return principal_table[i][static_cast<long long>(o_i) * num_types() + t];
  }

  Menu full_menu(int i) const { return (Menu{1} << num_outcomes(i)) - 1; }

  int outcome_index(int i, const std::string& label) const;
  int type_index(const std::string& label) const;

  bool operator==(const FiniteGame&) const = default;
};

// A per-principal type -> outcome-or-quit map; the range minus quit is the
// induced menu.
struct DirectMechanism {
  int principal = 0;
  std::vector<int> assignment;  // [type] -> outcome index, or kQuit

  Menu induced_menu() const {
    Menu m = 0;
    for (int o : assignment)
      if (o != kQuit) m |= Menu{1} << o;
    return m;
  }
  bool operator==(const DirectMechanism&) const = default;
  auto operator<=>(const DirectMechanism&) const = default;
};

// One atom of an agent choice: either global quit (intrinsic mode) or a full
// outcome profile.
struct Choice {
  bool quit = false;
  OutcomeProfile outcome;
  bool operator==(const Choice&) const = default;
  auto operator<=>(const Choice&) const = default;
};

struct ChoiceDist {
  std::vector<std::pair<Choice, Rational>> atoms;  // weights sum to 1
  bool is_pure() const { return atoms.size() == 1; }
};

enum class TieBreakPolicy { on_path_upr, adversarial_to_deviator, lexicographic };

struct StrategyEntry {
  ChoiceDist dist;
  TieBreakPolicy policy = TieBreakPolicy::lexicographic;
};

// Selection rule mapping (menu profile, type) to a distribution over outcome
// profiles. Entries are explicit. Nodes without entries can fall back to the
// lexicographic agent-optimal rule, or, when a reference profile is set, to
// the supporting convention: at a unilateral deviation from the reference the
// agent-optimal choice is tie-broken against the deviating principal, and
// everywhere else lexicographically.
struct AgentStrategy {
  std::map<std::pair<MenuProfile, int>, StrategyEntry> entries;
  bool lexicographic_default = false;
  std::optional<MenuProfile> adversarial_reference;

  void set(const MenuProfile& mp, int t, ChoiceDist dist,
           TieBreakPolicy policy = TieBreakPolicy::lexicographic) {
    entries[{mp, t}] = StrategyEntry{std::move(dist), policy};
  }
  const StrategyEntry* find(const MenuProfile& mp, int t) const {
    auto it = entries.find({mp, t});
    return it == entries.end() ? nullptr : &it->second;
  }
};

// The agent's optimal choice correspondence at one node, already folding in
// the outside-option mode: under intrinsic options a negative maximum forces
// quit; under delegated options the products are augmented with the outside
// outcomes.
struct NodeChoices {
  Rational max_value;        // max V over the (augmented) menu product
  std::vector<Choice> atoms; // all agent-optimal choices at this node
};

std::vector<int> menu_elements(Menu m);
int menu_size(Menu m);
MenuProfile augment_with_outside(const FiniteGame& game, const MenuProfile& mp);
NodeChoices node_choice_set(const FiniteGame& game, const MenuProfile& mp, int t);

// Checks Def.-style agent optimality of a distribution at one node.
bool choice_dist_is_optimal(const FiniteGame& game, const MenuProfile& mp, int t,
                            const ChoiceDist& dist);

// Resolves the strategy at a node, applying the lexicographic default when
// allowed. Returns nullopt when the strategy is undefined at the node.
std::optional<ChoiceDist> resolve_choice(const FiniteGame& game, const AgentStrategy& s,
                                         const MenuProfile& mp, int t);

// Exact E_t[u_i(sigma_A(profile, t), t)]. Throws GameFormatError when the
// strategy is undefined at some (profile, type).
Rational expected_principal_payoff(const FiniteGame& game, int i, const AgentStrategy& s,
                                   const MenuProfile& mp);
Rational dist_principal_payoff(const FiniteGame& game, int i, const ChoiceDist& dist, int t);

FiniteGame load_game(const std::string& json_text);
std::string serialize_game(const FiniteGame& game);

MenuProfile menus_of(const std::vector<DirectMechanism>& mechs);

}  // namespace comag

#endif  // COMAG_CORE_GAME_HPP_
