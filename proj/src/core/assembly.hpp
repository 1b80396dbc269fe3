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

#ifndef COMAG_CORE_ASSEMBLY_HPP_
#define COMAG_CORE_ASSEMBLY_HPP_

#include <optional>
#include <string>
#include <vector>

#include "core/game.hpp"

namespace comag {

// ----- Compatibility (utility-preserving recombination and variants) -----

enum class CompatibilityVariant { upr, upr_i, upr_d, men };

struct CompatibilityReport {
  CompatibilityVariant variant = CompatibilityVariant::upr;
  bool pass = false;
  // When pass: one utility-preserving agent-optimal choice per type.
  std::vector<Choice> witness;
  // When fail: the first violating type with the full agent-optimal set and,
  // per candidate, the per-principal utility gaps against the intended
  // assignments.
  int violating_type = -1;
  std::vector<Choice> agent_optimal_set;
  std::vector<std::vector<Rational>> utility_gaps;
  std::string detail;
};

// Exhaustive per-type search over the agent's argmax set for a
// utility-preserving witness. The men variant compares expected payoffs at
// the full profile against per-type singleton replacements and needs the
// agent strategy that the screening solutions were computed under.
CompatibilityReport check_compatibility(const FiniteGame& game,
                                        const std::vector<DirectMechanism>& mechanisms,
                                        CompatibilityVariant variant,
                                        const AgentStrategy* strategy = nullptr);

// ----- Sufficient conditions -----

struct AdditiveDecomposition {
  // component[i][o_i * num_types + t]; the last principal absorbs the
  // per-type constant, all others are pinned to 0 at their first outcome.
  std::vector<std::vector<Rational>> component;
};

struct SufficiencyFlags {
  bool non_indifference_global = false;
  std::optional<bool> non_indifference_profile;  // set when a profile is supplied
  bool additive_separable = false;
  std::optional<AdditiveDecomposition> decomposition;
  bool weakly_separable = false;
  std::optional<bool> singleton_structure;  // >= n-1 singleton menus
  std::optional<bool> quit_alignment;       // same quit sets across principals
};

SufficiencyFlags check_sufficiency(const FiniteGame& game,
                                   const std::optional<MenuProfile>& profile = std::nullopt,
                                   const std::vector<DirectMechanism>* mechanisms = nullptr);

// ----- Mutual fixed points of the screening programs -----

struct MutualProfile {
  std::vector<DirectMechanism> mechanisms;
  MenuProfile menus;
  CompatibilityReport compatibility;
};

struct ProfileSearchResult {
  std::vector<MutualProfile> profiles;
  bool bound_exceeded = false;
  bool truncated = false;
  std::string error;
};

// Exhaustive search over menu profiles for mutual best responses: every
// principal's menu must be the range of some optimal mechanism of her
// screening program against the rivals' menus. Each mechanism combination is
// reported with its compatibility verdict.
ProfileSearchResult find_p3_induced_profiles(const FiniteGame& game,
                                             long long profile_bound = 1 << 20, int cap = 256);

struct IterationResult {
  std::vector<MenuProfile> trajectory;
  bool fixed_point = false;
  bool cycle = false;
  int cycle_start = -1;  // index into trajectory when a cycle was detected
};

// Round-robin best-response iteration from a start profile; stops at a fixed
// point or on revisiting a profile (cycles reported, not resolved).
IterationResult best_response_iteration(const FiniteGame& game, const MenuProfile& start,
                                        int max_rounds = 64);

// ----- Classification and welfare -----

struct Classification {
  bool applicable = false;  // non-indifference hypothesis held (or lax mode)
  bool heuristic = false;   // lax mode despite failing hypothesis
  bool p3_induced = false;
  std::vector<std::pair<int, int>> unused_items;  // (principal, outcome)
  std::string refusal;
};

// A PBE is decomposition-induced iff every menu item is chosen on-path by
// some type; unused items are the strategic shields.
Classification classify_pbe(const FiniteGame& game, const MenuProfile& profile,
                            const AgentStrategy& strategy, bool strict = true);

struct ParetoEntry {
  MenuProfile profile;
  const AgentStrategy* strategy = nullptr;
};

struct ParetoResult {
  std::vector<std::vector<Rational>> payoff;        // per entry, per principal
  std::vector<std::pair<int, int>> dominance;       // (dominator, dominated)
  std::vector<int> frontier;                        // indices of non-dominated entries
  bool singleton_type_case = false;                 // |T| = 1
  std::optional<int> type_independent_peaked;       // principal index, n = 2 case
};

ParetoResult pareto_compare(const FiniteGame& game, const std::vector<ParetoEntry>& entries);

}  // namespace comag

#endif  // COMAG_CORE_ASSEMBLY_HPP_
