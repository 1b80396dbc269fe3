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

#ifndef COMAG_CORE_VERIFIER_HPP_
#define COMAG_CORE_VERIFIER_HPP_

#include <optional>
#include <string>
#include <vector>

#include "core/game.hpp"

namespace comag {

// ----- Brute-force equilibrium verification -----

struct DeviationRecord {
  int principal = 0;
  Menu menu = 0;
  Rational payoff;  // best achievable under the strategy
};

struct EquilibriumCertificate {
  MenuProfile profile;
  std::vector<Rational> equilibrium_payoff;  // per principal
  std::vector<DeviationRecord> deviations;   // full log
  bool is_pbe = false;
  std::optional<DeviationRecord> profitable_deviation;
  std::string failure;  // agent-optimality audit failures etc.
};

// Builds the supporting strategy from a compatibility witness: on-path the
// witness per type, unilateral deviations tie-broken against the deviator,
// everything else lexicographic. Throws GameFormatError when the
// compatibility check fails (no on-path assignment exists).
AgentStrategy construct_agent_strategy(const FiniteGame& game,
                                       const std::vector<DirectMechanism>& mechanisms);

// Exhaustive loop over each principal's 2^|O_i|-1 alternative menus. The
// strategy must resolve at the on-path profile and all unilateral deviations;
// its choices are audited for agent optimality at every consulted node.
EquilibriumCertificate verify_pbe(const FiniteGame& game, const MenuProfile& profile,
                                  const AgentStrategy& strategy);

// ----- Exact linear feasibility of a supporting strategy -----

struct LinearConstraint {
  std::vector<Rational> coeff;  // coeff . x <= rhs
  Rational rhs;
  std::string label;
};

struct FeasibilityNode {
  MenuProfile profile;
  int type = 0;
  std::vector<Choice> atoms;  // agent-optimal choices at this node
  int var_base = -1;          // first free weight; atoms.size()-1 vars, -1 if none
};

struct FeasibilitySystem {
  std::vector<FeasibilityNode> nodes;
  int num_vars = 0;
  std::vector<LinearConstraint> constraints;
  std::vector<std::string> var_names;
};

struct ContradictionTrace {
  std::string variable;      // empty when an original constant row is violated
  Rational lower_bound, upper_bound;
  std::string lower_label, upper_label;
  Rational gap;  // upper - lower, a negative rational
};

struct SupportResult {
  bool feasible = false;
  FeasibilitySystem system;
  std::vector<Rational> witness;          // per free variable, when feasible
  std::optional<AgentStrategy> strategy;  // concrete supporting sigma_A
  std::optional<ContradictionTrace> contradiction;
  std::string error;  // nonempty when the variable bound was exceeded
};

// Decides, by exact Fourier-Motzkin elimination, whether some agent strategy
// supports `profile` as a PBE; free variables are the tie-breaking weights at
// agent-indifferent nodes (on-path and unilateral deviations).
SupportResult support_feasibility(const FiniteGame& game, const MenuProfile& profile,
                                  int var_bound = 32);

// ----- Choice-consistency checks on agent strategies -----

enum class IiaVariant { iia1, iia2 };

struct IiaViolation {
  MenuProfile larger, smaller;
  int type = 0;
  std::string detail;
};

struct IiaReport {
  bool pass = true;
  std::optional<IiaViolation> violation;
};

// Checks menu-shrinkage consistency over every nested pair in `profiles`:
// iia1 requires the choice to carry over verbatim when its support survives
// the shrink; iia2 requires exact conditional rescaling of the surviving
// support.
IiaReport check_iia(const FiniteGame& game, const AgentStrategy& strategy, IiaVariant variant,
                    const std::vector<MenuProfile>& profiles);

}  // namespace comag

#endif  // COMAG_CORE_VERIFIER_HPP_
