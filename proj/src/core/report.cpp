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

#include "core/report.hpp"

#include <algorithm>
#include <cmath>

namespace comag {

using nlohmann::json;

json menu_to_json(const FiniteGame& game, int principal, Menu menu) {
  json arr = json::array();
  for (int o : menu_elements(menu)) arr.push_back(game.outcome_labels[principal][o]);
  return arr;
}

Menu menu_from_json(const FiniteGame& game, int principal, const json& j) {
  Menu m = 0;
  for (const auto& label : j) m |= Menu{1} << game.outcome_index(principal, label.get<std::string>());
  return m;
}

json menu_profile_to_json(const FiniteGame& game, const MenuProfile& mp) {
  json obj = json::object();
  for (int i = 0; i < game.n(); ++i) obj[game.principals[i]] = menu_to_json(game, i, mp[i]);
  return obj;
}

MenuProfile menu_profile_from_json(const FiniteGame& game, const json& j) {
  MenuProfile mp(game.n(), 0);
  for (int i = 0; i < game.n(); ++i) mp[i] = menu_from_json(game, i, j.at(game.principals[i]));
  return mp;
}

json mechanism_to_json(const FiniteGame& game, const DirectMechanism& mech) {
  json map = json::object();
  for (int t = 0; t < game.num_types(); ++t) {
    const int o = mech.assignment[t];
    map[game.type_labels[t]] =
        o == kQuit ? json("quit") : json(game.outcome_labels[mech.principal][o]);
  }
  return json{{"principal", game.principals[mech.principal]},
              {"map", map},
              {"menu", menu_to_json(game, mech.principal, mech.induced_menu())}};
}

DirectMechanism mechanism_from_json(const FiniteGame& game, const json& j) {
  DirectMechanism mech;
  const std::string pid = j.at("principal").get<std::string>();
  auto it = std::find(game.principals.begin(), game.principals.end(), pid);
  if (it == game.principals.end()) throw GameFormatError("unknown principal '" + pid + "'");
  mech.principal = static_cast<int>(it - game.principals.begin());
  mech.assignment.resize(game.num_types());
  for (int t = 0; t < game.num_types(); ++t) {
    const std::string label = j.at("map").at(game.type_labels[t]).get<std::string>();
    mech.assignment[t] =
        label == "quit" ? kQuit : game.outcome_index(mech.principal, label);
  }
  return mech;
}

std::vector<DirectMechanism> mechanisms_from_json(const FiniteGame& game, const json& j) {
  std::vector<DirectMechanism> out;
  for (const auto& m : j) out.push_back(mechanism_from_json(game, m));
  return out;
}

json choice_to_json(const FiniteGame& game, const Choice& c) {
  if (c.quit) return json{{"quit", true}};
  json arr = json::array();
  for (int i = 0; i < game.n(); ++i) arr.push_back(game.outcome_labels[i][c.outcome[i]]);
  return json{{"profile", arr}};
}

json strategy_to_json(const FiniteGame& game, const AgentStrategy& s) {
  json entries = json::array();
  for (const auto& [key, entry] : s.entries) {
    json atoms = json::array();
    for (const auto& [choice, w] : entry.dist.atoms) {
      json atom = choice_to_json(game, choice);
      atom["weight"] = rat_to_string(w);
      atoms.push_back(std::move(atom));
    }
    const char* policy = entry.policy == TieBreakPolicy::on_path_upr ? "on-path-upr"
                         : entry.policy == TieBreakPolicy::adversarial_to_deviator
                             ? "adversarial-to-deviator"
                             : "lexicographic";
    entries.push_back(json{{"menus", menu_profile_to_json(game, key.first)},
                           {"type", game.type_labels[key.second]},
                           {"choice", atoms},
                           {"policy", policy}});
  }
  return json{{"entries", entries},
              {"lexicographic_default", s.lexicographic_default},
              {"adversarial_reference",
               s.adversarial_reference ? menu_profile_to_json(game, *s.adversarial_reference)
                                       : json(nullptr)}};
}

AgentStrategy strategy_from_json(const FiniteGame& game, const json& j) {
  AgentStrategy s;
  s.lexicographic_default = j.value("lexicographic_default", false);
  if (j.contains("adversarial_reference") && !j["adversarial_reference"].is_null())
    s.adversarial_reference = menu_profile_from_json(game, j["adversarial_reference"]);
  for (const auto& e : j.value("entries", json::array())) {
    MenuProfile mp = menu_profile_from_json(game, e.at("menus"));
    const int t = game.type_index(e.at("type").get<std::string>());
    ChoiceDist dist;
    for (const auto& atom : e.at("choice")) {
      Choice c;
      if (atom.value("quit", false)) {
        c.quit = true;
      } else {
        const auto& prof = atom.at("profile");
        c.outcome.resize(game.n());
        for (int i = 0; i < game.n(); ++i)
          c.outcome[i] = game.outcome_index(i, prof[i].get<std::string>());
      }
      Rational w = atom.contains("weight") ? rat_parse_or_throw(atom["weight"].get<std::string>())
                                           : Rational(1);
      dist.atoms.emplace_back(std::move(c), std::move(w));
    }
    TieBreakPolicy policy = TieBreakPolicy::lexicographic;
    const std::string p = e.value("policy", "lexicographic");
    if (p == "on-path-upr") policy = TieBreakPolicy::on_path_upr;
    if (p == "adversarial-to-deviator") policy = TieBreakPolicy::adversarial_to_deviator;
    s.set(mp, t, std::move(dist), policy);
  }
  return s;
}

json indirect_table_to_json(const FiniteGame& game, const IndirectUtilityTable& table) {
  const int i = table.principal;
  json rows = json::array();
  auto emit = [&](int o, const std::string& label) {
    for (int t = 0; t < table.num_types; ++t) {
      const IndirectEntry& cell = table.at(o, t);
      json witnesses = json::array();
      for (const auto& w : cell.witnesses) {
        json wj = json::object();
        for (int k = 0; k < game.n(); ++k)
          if (k != i) wj[game.principals[k]] = game.outcome_labels[k][w[k]];
        witnesses.push_back(std::move(wj));
      }
      rows.push_back(json{{"outcome", label},
                          {"type", game.type_labels[t]},
                          {"value", rat_to_string(cell.value)},
                          {"witnesses", witnesses}});
    }
  };
  for (int o = 0; o < table.num_own_outcomes; ++o) emit(o, game.outcome_labels[i][o]);
  if (table.has_quit_row) emit(kQuit, "quit");
  return json{{"principal", game.principals[i]},
              {"rival_menus", menu_profile_to_json(game, table.rival_menus)},
              {"rows", rows}};
}

json screening_solution_to_json(const FiniteGame& game, const ScreeningSolution& sol) {
  json mechs = json::array();
  for (const auto& m : sol.mechanisms) mechs.push_back(mechanism_to_json(game, m));
  return json{{"feasible", sol.feasible},
              {"optimal_value", sol.feasible ? json(rat_to_string(sol.optimal_value)) : json(nullptr)},
              {"mechanisms", mechs},
              {"truncated", sol.truncated}};
}

json compatibility_to_json(const FiniteGame& game, const CompatibilityReport& report) {
  const char* variant = report.variant == CompatibilityVariant::upr       ? "upr"
                        : report.variant == CompatibilityVariant::upr_i   ? "upr-i"
                        : report.variant == CompatibilityVariant::upr_d   ? "upr-d"
                                                                          : "men";
  json j{{"variant", variant}, {"pass", report.pass}};
  if (report.pass) {
    json w = json::array();
    for (int t = 0; t < static_cast<int>(report.witness.size()); ++t) {
      json wt = choice_to_json(game, report.witness[t]);
      wt["type"] = game.type_labels[t];
      w.push_back(std::move(wt));
    }
    j["witness"] = w;
  } else {
    if (report.violating_type >= 0) j["violating_type"] = game.type_labels[report.violating_type];
    json cands = json::array();
    for (size_t k = 0; k < report.agent_optimal_set.size(); ++k) {
      json c = choice_to_json(game, report.agent_optimal_set[k]);
      if (k < report.utility_gaps.size()) {
        json gaps = json::object();
        for (int i = 0; i < game.n(); ++i)
          gaps[game.principals[i]] = rat_to_string(report.utility_gaps[k][i]);
        c["utility_gaps"] = gaps;
      }
      cands.push_back(std::move(c));
    }
    j["agent_optimal_set"] = cands;
    j["detail"] = report.detail;
  }
  return j;
}

json sufficiency_to_json(const FiniteGame& game, const SufficiencyFlags& flags) {
  json j{{"non_indifference_global", flags.non_indifference_global},
         {"additive_separable", flags.additive_separable},
         {"weakly_separable", flags.weakly_separable}};
  if (flags.non_indifference_profile) j["non_indifference_profile"] = *flags.non_indifference_profile;
  if (flags.singleton_structure) j["singleton_structure"] = *flags.singleton_structure;
  if (flags.quit_alignment) j["quit_alignment"] = *flags.quit_alignment;
  if (flags.decomposition) {
    json dec = json::object();
    for (int i = 0; i < game.n(); ++i) {
      json rows = json::array();
      for (int o = 0; o < game.num_outcomes(i); ++o)
        for (int t = 0; t < game.num_types(); ++t)
          rows.push_back(json{{"outcome", game.outcome_labels[i][o]},
                              {"type", game.type_labels[t]},
                              {"value", rat_to_string(flags.decomposition->component[i][static_cast<size_t>(o) * game.num_types() + t])}});
      dec[game.principals[i]] = rows;
    }
    j["decomposition"] = dec;
  }
  return j;
}

json profile_search_to_json(const FiniteGame& game, const ProfileSearchResult& result) {
  json profiles = json::array();
  for (const auto& p : result.profiles) {
    json mechs = json::array();
    for (const auto& m : p.mechanisms) mechs.push_back(mechanism_to_json(game, m));
    profiles.push_back(json{{"mechanisms", mechs},
                            {"menus", menu_profile_to_json(game, p.menus)},
                            {"compatibility", compatibility_to_json(game, p.compatibility)}});
  }
  json j{{"profiles", profiles},
         {"bound_exceeded", result.bound_exceeded},
         {"truncated", result.truncated}};
  if (!result.error.empty()) j["error"] = result.error;
  return j;
}

json iteration_to_json(const FiniteGame& game, const IterationResult& result) {
  json traj = json::array();
  for (const auto& mp : result.trajectory) traj.push_back(menu_profile_to_json(game, mp));
  return json{{"trajectory", traj},
              {"fixed_point", result.fixed_point},
              {"cycle", result.cycle},
              {"cycle_start", result.cycle_start}};
}

json classification_to_json(const FiniteGame& game, const Classification& cls) {
  json unused = json::array();
  for (const auto& [i, o] : cls.unused_items)
    unused.push_back(json{{"principal", game.principals[i]},
                          {"outcome", game.outcome_labels[i][o]}});
  json j{{"applicable", cls.applicable},
         {"heuristic", cls.heuristic},
         {"p3_induced", cls.p3_induced},
         {"unused_items", unused}};
  if (!cls.refusal.empty()) j["refusal"] = cls.refusal;
  return j;
}

json pareto_to_json(const FiniteGame& game, const ParetoResult& result) {
  json payoffs = json::array();
  for (const auto& vec : result.payoff) {
    json v = json::object();
    for (int i = 0; i < game.n(); ++i) v[game.principals[i]] = rat_to_string(vec[i]);
    payoffs.push_back(std::move(v));
  }
  json dom = json::array();
  for (const auto& [a, b] : result.dominance) dom.push_back(json{{"dominator", a}, {"dominated", b}});
  json j{{"payoffs", payoffs}, {"dominance", dom}, {"frontier", result.frontier},
         {"single_type_case", result.singleton_type_case}};
  if (result.type_independent_peaked)
    j["type_independent_peaked_principal"] = game.principals[*result.type_independent_peaked];
  return j;
}

json certificate_to_json(const FiniteGame& game, const EquilibriumCertificate& cert) {
  json devs = json::array();
  for (const auto& d : cert.deviations)
    devs.push_back(json{{"principal", game.principals[d.principal]},
                        {"menu", menu_to_json(game, d.principal, d.menu)},
                        {"payoff", rat_to_string(d.payoff)}});
  json eq = json::object();
  for (int i = 0; i < game.n(); ++i)
    eq[game.principals[i]] = rat_to_string(cert.equilibrium_payoff[i]);
  json j{{"profile", menu_profile_to_json(game, cert.profile)},
         {"verdict", cert.is_pbe ? "pbe" : "not-pbe"},
         {"equilibrium_payoff", eq},
         {"deviations", devs}};
  if (cert.profitable_deviation)
    j["profitable_deviation"] =
        json{{"principal", game.principals[cert.profitable_deviation->principal]},
             {"menu", menu_to_json(game, cert.profitable_deviation->principal,
                                   cert.profitable_deviation->menu)},
             {"payoff", rat_to_string(cert.profitable_deviation->payoff)}};
  if (!cert.failure.empty()) j["failure"] = cert.failure;
  return j;
}

json support_to_json(const FiniteGame& game, const SupportResult& result) {
  json j{{"feasible", result.feasible},
         {"free_variables", result.system.num_vars}};
  if (!result.error.empty()) {
    j["error"] = result.error;
    return j;
  }
  if (result.feasible) {
    json weights = json::object();
    for (int v = 0; v < result.system.num_vars; ++v)
      weights[result.system.var_names[v]] = rat_to_string(result.witness[v]);
    j["witness_weights"] = weights;
    if (result.strategy) j["strategy"] = strategy_to_json(game, *result.strategy);
  } else if (result.contradiction) {
    const auto& c = *result.contradiction;
    json cj{{"gap", rat_to_string(c.gap)}};
    if (!c.variable.empty()) {
      cj["variable"] = c.variable;
      cj["lower_bound"] = rat_to_string(c.lower_bound);
      cj["upper_bound"] = rat_to_string(c.upper_bound);
      cj["lower_constraint"] = c.lower_label;
      cj["upper_constraint"] = c.upper_label;
    } else {
      cj["constraint"] = c.lower_label;
    }
    j["contradiction"] = cj;
  }
  return j;
}

json iia_to_json(const FiniteGame& game, const IiaReport& report) {
  json j{{"pass", report.pass}};
  if (report.violation) {
    j["violation"] = json{{"larger", menu_profile_to_json(game, report.violation->larger)},
                          {"smaller", menu_profile_to_json(game, report.violation->smaller)},
                          {"type", game.type_labels[report.violation->type]},
                          {"detail", report.violation->detail}};
  }
  return j;
}

json condition_report_to_json(const ConditionReport& report) {
  json conds = json::array();
  for (const auto& c : report.conditions)
    conds.push_back(json{{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}});
  json j{{"pass", report.pass},
         {"conditions", conds},
         {"tolerance", report.tolerance},
         {"monotonicity_margin", report.monotonicity_margin},
         {"jump_margins", report.jump_margins},
         {"boundary_residuals", report.boundary_residuals},
         {"integral_residual", report.integral_residual}};
  if (!report.error.empty()) j["error"] = report.error;
  return j;
}

json delegation_profile_to_json(const DelegationProfile& profile) {
  json segments = json::array();
  for (const auto& s : profile.interval_menu)
    segments.push_back(json{{"t_lo", s.t_lo}, {"t_hi", s.t_hi}, {"offset", s.offset}});
  double max_bliss = 0, max_slack = 0;
  for (double r : profile.bliss_residual) max_bliss = std::max(max_bliss, std::fabs(r));
  for (double r : profile.envelope_slack) max_slack = std::max(max_slack, std::fabs(r));
  return json{{"description", profile.description},
              {"coarse_principal", profile.coarse_principal + 1},
              {"fine_principal", profile.fine_principal + 1},
              {"finite_menu", profile.finite_menu},
              {"interval_menu", segments},
              {"max_bliss_residual", max_bliss},
              {"max_envelope_slack", max_slack},
              {"grid_points", profile.grid.size()}};
}

json cross_validation_to_json(const CrossValidation& xv) {
  json j{{"mutual_profile_found", xv.mutual_profile_found},
         {"upr_pass", xv.upr_pass},
         {"allocation_sup_distance", xv.allocation_sup_distance},
         {"outcome_step", xv.outcome_step}};
  if (!xv.note.empty()) j["note"] = xv.note;
  return j;
}

json priced_menu_to_json(const PricedMenu& menu) {
  json items = json::array();
  for (const auto& [b, p] : menu.items) items.push_back(json{{"bundle", b}, {"price", p}});
  return items;
}

PricedMenu priced_menu_from_json(const json& j) {
  PricedMenu menu;
  for (const auto& item : j)
    menu.items.emplace_back(item.at("bundle").get<int>(), item.at("price").get<double>());
  return menu;
}

json tstar_to_json(const TstarResult& result) {
  json j{{"ok", result.ok}, {"monotone", result.monotone}};
  if (result.ok) {
    j["tstar"] = result.tstar;
    j["half_gross_value"] = result.lhs;
    j["virtual_surplus"] = result.rhs;
    j["residual"] = result.residual;
  } else {
    j["error"] = result.error;
  }
  return j;
}

json pairs_to_json(const JointlyOptimalPairs& pairs) {
  json arr = json::array();
  for (const auto& [b1, b2] : pairs.pairs) arr.push_back(json{{"b1", b1}, {"b2", b2}});
  return json{{"pairs", arr}, {"count", pairs.pairs.size()}, {"empty", pairs.empty_reported}};
}

json market_split_to_json(const MarketSplitReport& report) {
  json j{{"pass", report.pass}, {"tstar", report.tstar},
         {"expected_price", report.expected_price}};
  if (!report.violation.empty()) j["violation"] = report.violation;
  return j;
}

json upgrade_menu_to_json(const UpgradeMenuResult& result) {
  json j{{"ok", result.ok}};
  if (!result.ok) {
    j["error"] = result.error;
    return j;
  }
  const char* structure = result.structure == MenuStructure::singleton ? "singleton"
                          : result.structure == MenuStructure::nested  ? "nested"
                                                                       : "tree";
  j["base_menu"] = priced_menu_to_json(result.base_menu);
  j["upgrade_menu"] = priced_menu_to_json(result.upgrade_menu);
  j["structure"] = structure;
  j["tstar"] = result.tstar;
  j["breakpoints"] = result.breakpoints;
  return j;
}

json md_star_to_json(const MdStarReport& report) {
  json v = json::array();
  for (const auto& viol : report.violations)
    v.push_back(json{{"b", viol.b}, {"b_prime", viol.bprime}, {"reversal", viol.reversal}});
  return json{{"pass", report.pass},
              {"violations", v},
              {"worst_reversal", report.worst_reversal},
              {"scope", report.scope}};
}

SampledFamily family_from_json(const json& j) {
  SampledFamily family;
  family.grid = j.at("grid").get<std::vector<double>>();
  for (const auto& member : j.at("members")) {
    family.values.push_back(member.at("values").get<std::vector<double>>());
    if (member.contains("derivatives"))
      family.derivatives.push_back(member["derivatives"].get<std::vector<double>>());
  }
  if (!family.derivatives.empty() && family.derivatives.size() != family.values.size())
    throw std::invalid_argument("either all members or none carry derivative arrays");
  return family;
}

json envelope_audit_to_json(const EnvelopeAudit& audit) {
  json kinks = json::array();
  for (const auto& k : audit.kinks)
    kinks.push_back(json{{"location", k.location},
                         {"left_slope", k.left_slope},
                         {"right_slope", k.right_slope},
                         {"upward", k.upward}});
  return json{{"kinks", kinks},
              {"lipschitz_estimate", audit.lipschitz_estimate},
              {"grid_points", audit.envelope.size()}};
}

}  // namespace comag
