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

#ifndef COMAG_CORE_REPORT_HPP_
#define COMAG_CORE_REPORT_HPP_

#include <string>

#include <json.hpp>

#include "core/assembly.hpp"
#include "core/bundling.hpp"
#include "core/delegation.hpp"
#include "core/envelope.hpp"
#include "core/game.hpp"
#include "core/indirect.hpp"
#include "core/screening.hpp"
#include "core/verifier.hpp"

namespace comag {

// Stable JSON encodings of inputs and reports, shared by the C API and the
// command-line tool. All rationals serialize as "num/den" strings.

nlohmann::json menu_to_json(const FiniteGame& game, int principal, Menu menu);
Menu menu_from_json(const FiniteGame& game, int principal, const nlohmann::json& j);
nlohmann::json menu_profile_to_json(const FiniteGame& game, const MenuProfile& mp);
MenuProfile menu_profile_from_json(const FiniteGame& game, const nlohmann::json& j);

nlohmann::json mechanism_to_json(const FiniteGame& game, const DirectMechanism& mech);
DirectMechanism mechanism_from_json(const FiniteGame& game, const nlohmann::json& j);
std::vector<DirectMechanism> mechanisms_from_json(const FiniteGame& game,
                                                  const nlohmann::json& j);

nlohmann::json choice_to_json(const FiniteGame& game, const Choice& c);
nlohmann::json strategy_to_json(const FiniteGame& game, const AgentStrategy& s);
AgentStrategy strategy_from_json(const FiniteGame& game, const nlohmann::json& j);

nlohmann::json indirect_table_to_json(const FiniteGame& game, const IndirectUtilityTable& table);
nlohmann::json screening_solution_to_json(const FiniteGame& game, const ScreeningSolution& sol);
nlohmann::json compatibility_to_json(const FiniteGame& game, const CompatibilityReport& report);
nlohmann::json sufficiency_to_json(const FiniteGame& game, const SufficiencyFlags& flags);
nlohmann::json profile_search_to_json(const FiniteGame& game, const ProfileSearchResult& result);
nlohmann::json iteration_to_json(const FiniteGame& game, const IterationResult& result);
nlohmann::json classification_to_json(const FiniteGame& game, const Classification& cls);
nlohmann::json pareto_to_json(const FiniteGame& game, const ParetoResult& result);
nlohmann::json certificate_to_json(const FiniteGame& game, const EquilibriumCertificate& cert);
nlohmann::json support_to_json(const FiniteGame& game, const SupportResult& result);
nlohmann::json iia_to_json(const FiniteGame& game, const IiaReport& report);

nlohmann::json condition_report_to_json(const ConditionReport& report);
nlohmann::json delegation_profile_to_json(const DelegationProfile& profile);
nlohmann::json cross_validation_to_json(const CrossValidation& xv);

nlohmann::json priced_menu_to_json(const PricedMenu& menu);
PricedMenu priced_menu_from_json(const nlohmann::json& j);
nlohmann::json tstar_to_json(const TstarResult& result);
nlohmann::json pairs_to_json(const JointlyOptimalPairs& pairs);
nlohmann::json market_split_to_json(const MarketSplitReport& report);
nlohmann::json upgrade_menu_to_json(const UpgradeMenuResult& result);
nlohmann::json md_star_to_json(const MdStarReport& report);

SampledFamily family_from_json(const nlohmann::json& j);
nlohmann::json envelope_audit_to_json(const EnvelopeAudit& audit);

}  // namespace comag

#endif  // COMAG_CORE_REPORT_HPP_
