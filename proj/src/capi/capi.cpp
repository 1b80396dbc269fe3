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

#include "comag.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <string>

#include "core/report.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

comag_status fail(comag_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Runs fn, mapping exceptions onto status codes. fn returns a status itself
// so verdict-negative outcomes can flow through with a report attached.
template <typename Fn>
comag_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const comag::GameFormatError& e) {
    return fail(COMAG_ERR_INVALID, e.what());
  } catch (const json::exception& e) {
    return fail(COMAG_ERR_PARSE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(COMAG_ERR_INVALID, e.what());
  } catch (const std::exception& e) {
    return fail(COMAG_ERR_INTERNAL, e.what());
  }
}

json parse(const char* text, const char* what) {
  if (text == nullptr || *text == '\0') return json::object();
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument(std::string("malformed JSON in ") + what);
  return j;
}

}  // namespace

struct comag_game {
  comag::FiniteGame game;
};
struct comag_delegation_model {
  comag::DelegationModel model;
};
struct comag_bundling_model {
  comag::BundlingModel model;
};

extern "C" {

const char* comag_version(void) { return "0.1.0"; }

const char* comag_last_error(void) { return g_last_error.c_str(); }

void comag_string_free(char* s) { std::free(s); }

comag_status comag_game_load(const char* game_json, comag_game** out) {
  if (game_json == nullptr || out == nullptr) return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    try {
      auto handle = new comag_game{comag::load_game(game_json)};
      *out = handle;
      return COMAG_OK;
    } catch (const comag::GameFormatError& e) {
      return fail(COMAG_ERR_PARSE, e.what());
    }
  });
}

void comag_game_free(comag_game* game) { delete game; }

comag_status comag_game_serialize(const comag_game* game, char** json_out) {
  if (game == nullptr || json_out == nullptr) return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    *json_out = dup_string(comag::serialize_game(game->game));
    return COMAG_OK;
  });
}

comag_status comag_solve_screening(const comag_game* game, const char* options_json,
                                   char** report_out) {
  if (game == nullptr || report_out == nullptr) return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    const json opts = parse(options_json, "options");
    const comag::FiniteGame& g = game->game;
    comag::ScreeningProblem problem;
    problem.game = &g;
    const std::string pid = opts.at("principal").get<std::string>();
    auto it = std::find(g.principals.begin(), g.principals.end(), pid);
    if (it == g.principals.end()) return fail(COMAG_ERR_INVALID, "unknown principal");
    problem.principal = static_cast<int>(it - g.principals.begin());
    problem.rival_menus.assign(g.n(), 0);
    const json& rivals = opts.at("rivals");
    for (int i = 0; i < g.n(); ++i) {
      if (i == problem.principal) continue;
      problem.rival_menus[i] = comag::menu_from_json(g, i, rivals.at(g.principals[i]));
      if (problem.rival_menus[i] == 0) return fail(COMAG_ERR_INVALID, "empty rival menu");
    }
    problem.solution_cap = opts.value("cap", 64);
    comag::AgentStrategy strategy;
    if (opts.value("general", false)) {
      problem.form = comag::ObjectiveForm::general_with_strategy;
      strategy = comag::strategy_from_json(g, opts.at("strategy"));
      problem.strategy = &strategy;
    }
    comag::ScreeningSolution sol = comag::solve_screening(problem);
    *report_out = dup_string(comag::screening_solution_to_json(g, sol).dump(2));
    return sol.feasible ? COMAG_OK : COMAG_VERDICT_NEGATIVE;
  });
}

comag_status comag_indirect_utility(const comag_game* game, const char* options_json,
                                    char** report_out) {
  if (game == nullptr || report_out == nullptr) return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    const json opts = parse(options_json, "options");
    const comag::FiniteGame& g = game->game;
    const std::string pid = opts.at("principal").get<std::string>();
    auto it = std::find(g.principals.begin(), g.principals.end(), pid);
    if (it == g.principals.end()) return fail(COMAG_ERR_INVALID, "unknown principal");
    const int principal = static_cast<int>(it - g.principals.begin());

    comag::IndirectUtilityTable table;
    if (opts.contains("mixture")) {
      std::vector<comag::WeightedRivalMenus> mixture;
      for (const auto& part : opts["mixture"]) {
        comag::WeightedRivalMenus w;
        w.rival_menus.assign(g.n(), 0);
        for (int i = 0; i < g.n(); ++i)
          if (i != principal)
            w.rival_menus[i] = comag::menu_from_json(g, i, part.at("rivals").at(g.principals[i]));
        w.weight = comag::rat_parse_or_throw(part.at("weight").get<std::string>());
        mixture.push_back(std::move(w));
      }
      table = comag::indirect_utility_mixed(g, principal, mixture);
    } else {
      comag::MenuProfile rivals(g.n(), 0);
      for (int i = 0; i < g.n(); ++i)
        if (i != principal)
          rivals[i] = comag::menu_from_json(g, i, opts.at("rivals").at(g.principals[i]));
      table = comag::indirect_utility(g, principal, rivals);
    }
    *report_out = dup_string(comag::indirect_table_to_json(g, table).dump(2));
    return COMAG_OK;
  });
}

comag_status comag_check_compatibility(const comag_game* game, const char* variant,
                                       const char* mechanisms_json, char** report_out) {
  if (game == nullptr || variant == nullptr || report_out == nullptr)
    return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    const json doc = parse(mechanisms_json, "mechanisms");
    const comag::FiniteGame& g = game->game;
    const std::string v(variant);
    comag::CompatibilityVariant cv;
    if (v == "upr") cv = comag::CompatibilityVariant::upr;
    else if (v == "upr-i") cv = comag::CompatibilityVariant::upr_i;
    else if (v == "upr-d") cv = comag::CompatibilityVariant::upr_d;
    else if (v == "men") cv = comag::CompatibilityVariant::men;
    else return fail(COMAG_ERR_USAGE, "variant must be upr|upr-i|upr-d|men");

    auto mechs = comag::mechanisms_from_json(g, doc.at("mechanisms"));
    comag::AgentStrategy strategy;
    const comag::AgentStrategy* sp = nullptr;
    if (doc.contains("strategy")) {
      strategy = comag::strategy_from_json(g, doc["strategy"]);
      sp = &strategy;
    }
    comag::CompatibilityReport report = comag::check_compatibility(g, mechs, cv, sp);
    *report_out = dup_string(comag::compatibility_to_json(g, report).dump(2));
    return report.pass ? COMAG_OK : COMAG_VERDICT_NEGATIVE;
  });
}

comag_status comag_check_sufficiency(const comag_game* game, const char* profile_json,
                                     char** report_out) {
  if (game == nullptr || report_out == nullptr) return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    const json doc = parse(profile_json, "profile");
    const comag::FiniteGame& g = game->game;
    std::optional<comag::MenuProfile> profile;
    if (doc.contains("menus")) profile = comag::menu_profile_from_json(g, doc["menus"]);
    std::vector<comag::DirectMechanism> mechs;
    const std::vector<comag::DirectMechanism>* mp = nullptr;
    if (doc.contains("mechanisms")) {
      mechs = comag::mechanisms_from_json(g, doc["mechanisms"]);
      mp = &mechs;
      if (!profile) profile = comag::menus_of(mechs);
    }
    comag::SufficiencyFlags flags = comag::check_sufficiency(g, profile, mp);
    *report_out = dup_string(comag::sufficiency_to_json(g, flags).dump(2));
    return COMAG_OK;
  });
}

comag_status comag_find_equilibria(const comag_game* game, const char* options_json,
                                   char** report_out) {
  if (game == nullptr || report_out == nullptr) return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    const json opts = parse(options_json, "options");
    const comag::FiniteGame& g = game->game;
    if (opts.contains("iterate_from")) {
      comag::MenuProfile start = comag::menu_profile_from_json(g, opts["iterate_from"]);
      comag::IterationResult res =
          comag::best_response_iteration(g, start, opts.value("rounds", 64));
      *report_out = dup_string(comag::iteration_to_json(g, res).dump(2));
      return COMAG_OK;
    }
    comag::ProfileSearchResult res = comag::find_p3_induced_profiles(
        g, opts.value("bound", static_cast<long long>(1) << 20), opts.value("cap", 256));
    *report_out = dup_string(comag::profile_search_to_json(g, res).dump(2));
    if (res.bound_exceeded) return COMAG_ERR_INVALID;
    return COMAG_OK;
  });
}

comag_status comag_pareto(const comag_game* game, const char* entries_json, char** report_out) {
  if (game == nullptr || report_out == nullptr) return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    const json doc = parse(entries_json, "entries");
    const comag::FiniteGame& g = game->game;
    std::vector<comag::AgentStrategy> strategies;
    std::vector<comag::MenuProfile> profiles;
    for (const auto& e : doc.at("entries")) {
      profiles.push_back(comag::menu_profile_from_json(g, e.at("menus")));
      if (e.contains("strategy")) {
        strategies.push_back(comag::strategy_from_json(g, e["strategy"]));
      } else {
        comag::AgentStrategy s;
        s.lexicographic_default = true;
        strategies.push_back(std::move(s));
      }
    }
    std::vector<comag::ParetoEntry> entries;
    for (size_t k = 0; k < profiles.size(); ++k)
      entries.push_back({profiles[k], &strategies[k]});
    comag::ParetoResult res = comag::pareto_compare(g, entries);
    *report_out = dup_string(comag::pareto_to_json(g, res).dump(2));
    return COMAG_OK;
  });
}

comag_status comag_classify(const comag_game* game, const char* profile_json,
                            char** report_out) {
  if (game == nullptr || report_out == nullptr) return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    const json doc = parse(profile_json, "profile");
    const comag::FiniteGame& g = game->game;
    comag::MenuProfile profile = comag::menu_profile_from_json(g, doc.at("menus"));
    comag::AgentStrategy strategy;
    if (doc.contains("strategy")) strategy = comag::strategy_from_json(g, doc["strategy"]);
    else strategy.lexicographic_default = true;
    comag::Classification cls =
        comag::classify_pbe(g, profile, strategy, doc.value("strict", true));
    *report_out = dup_string(comag::classification_to_json(g, cls).dump(2));
    if (!cls.applicable) return COMAG_ERR_INVALID;
    return COMAG_OK;
  });
}

comag_status comag_verify(const comag_game* game, const char* profile_json, char** report_out) {
  if (game == nullptr || report_out == nullptr) return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    const json doc = parse(profile_json, "profile");
    const comag::FiniteGame& g = game->game;
    comag::MenuProfile profile = comag::menu_profile_from_json(g, doc.at("menus"));
    json report;
    bool positive = false;
    if (doc.contains("strategy")) {
      comag::AgentStrategy strategy = comag::strategy_from_json(g, doc["strategy"]);
      comag::EquilibriumCertificate cert = comag::verify_pbe(g, profile, strategy);
      report = comag::certificate_to_json(g, cert);
      positive = cert.is_pbe;
    } else {
      comag::SupportResult support = comag::support_feasibility(g, profile);
      if (!support.error.empty()) return fail(COMAG_ERR_INVALID, support.error);
      report["support"] = comag::support_to_json(g, support);
      if (support.feasible) {
        comag::EquilibriumCertificate cert = comag::verify_pbe(g, profile, *support.strategy);
        report["certificate"] = comag::certificate_to_json(g, cert);
        positive = cert.is_pbe;
      } else {
        report["certificate"] = nullptr;
        positive = false;
      }
    }
    report["verdict"] = positive ? "pbe" : "not-pbe";
    *report_out = dup_string(report.dump(2));
    return positive ? COMAG_OK : COMAG_VERDICT_NEGATIVE;
  });
}

comag_status comag_support(const comag_game* game, const char* profile_json,
                           char** report_out) {
  if (game == nullptr || report_out == nullptr) return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    const json doc = parse(profile_json, "profile");
    const comag::FiniteGame& g = game->game;
    comag::MenuProfile profile = comag::menu_profile_from_json(g, doc.at("menus"));
    comag::SupportResult res =
        comag::support_feasibility(g, profile, doc.value("var_bound", 32));
    if (!res.error.empty()) return fail(COMAG_ERR_INVALID, res.error);
    *report_out = dup_string(comag::support_to_json(g, res).dump(2));
    return res.feasible ? COMAG_OK : COMAG_VERDICT_NEGATIVE;
  });
}

comag_status comag_check_iia(const comag_game* game, const char* options_json,
                             char** report_out) {
  if (game == nullptr || report_out == nullptr) return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    const json opts = parse(options_json, "options");
    const comag::FiniteGame& g = game->game;
    const std::string v = opts.at("variant").get<std::string>();
    comag::IiaVariant variant;
    if (v == "iia-1") variant = comag::IiaVariant::iia1;
    else if (v == "iia-2") variant = comag::IiaVariant::iia2;
    else return fail(COMAG_ERR_USAGE, "variant must be iia-1 or iia-2");
    comag::AgentStrategy strategy = comag::strategy_from_json(g, opts.at("strategy"));
    std::vector<comag::MenuProfile> profiles;
    for (const auto& p : opts.at("profiles"))
      profiles.push_back(comag::menu_profile_from_json(g, p));
    comag::IiaReport report = comag::check_iia(g, strategy, variant, profiles);
    *report_out = dup_string(comag::iia_to_json(g, report).dump(2));
    return report.pass ? COMAG_OK : COMAG_VERDICT_NEGATIVE;
  });
}

comag_status comag_construct_strategy(const comag_game* game, const char* mechanisms_json,
                                      char** strategy_out) {
  if (game == nullptr || strategy_out == nullptr) return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    const json doc = parse(mechanisms_json, "mechanisms");
    const comag::FiniteGame& g = game->game;
    auto mechs = comag::mechanisms_from_json(g, doc.at("mechanisms"));
    comag::AgentStrategy strategy = comag::construct_agent_strategy(g, mechs);
    *strategy_out = dup_string(comag::strategy_to_json(g, strategy).dump(2));
    return COMAG_OK;
  });
}

/* ----- delegation ----- */

comag_status comag_delegation_load(const char* model_json, comag_delegation_model** out) {
  if (model_json == nullptr || out == nullptr) return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    *out = new comag_delegation_model{comag::load_delegation_model(model_json)};
    return COMAG_OK;
  });
}

void comag_delegation_free(comag_delegation_model* model) { delete model; }

comag_status comag_delegation_run(const comag_delegation_model* model, const char* op,
                                  const char* spec_json, const char* options_json,
                                  char** report_out) {
  if (model == nullptr || op == nullptr || report_out == nullptr)
    return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    const std::string operation(op);
    comag::RegimeSpec spec = comag::load_regime_spec(spec_json);
    const json opts = parse(options_json, "options");
    if (operation == "check") {
      comag::ConditionReport report =
          comag::check_regime(model->model, spec, opts.value("grid", 0));
      *report_out = dup_string(comag::condition_report_to_json(report).dump(2));
      return report.pass ? COMAG_OK : COMAG_VERDICT_NEGATIVE;
    }
    if (operation == "build") {
      comag::ConditionReport report =
          comag::check_regime(model->model, spec, opts.value("grid", 0));
      comag::DelegationProfile profile =
          comag::build_delegation_profile(model->model, spec, report);
      json j = comag::delegation_profile_to_json(profile);
      j["conditions"] = comag::condition_report_to_json(report);
      *report_out = dup_string(j.dump(2));
      return COMAG_OK;
    }
    if (operation == "xval") {
      comag::CrossValidation xv = comag::cross_validate_discretized(
          model->model, spec, opts.value("types", 9), opts.value("outcomes", 17));
      *report_out = dup_string(comag::cross_validation_to_json(xv).dump(2));
      return xv.mutual_profile_found ? COMAG_OK : COMAG_VERDICT_NEGATIVE;
    }
    return fail(COMAG_ERR_USAGE, "op must be check|build|xval");
  });
}

/* ----- bundling ----- */

comag_status comag_bundling_load(const char* model_json, comag_bundling_model** out) {
  if (model_json == nullptr || out == nullptr) return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    *out = new comag_bundling_model{comag::load_bundling_model(model_json)};
    return COMAG_OK;
  });
}

void comag_bundling_free(comag_bundling_model* model) { delete model; }

comag_status comag_bundling_run(const comag_bundling_model* model, const char* op,
                                const char* options_json, char** report_out) {
  if (model == nullptr || op == nullptr || report_out == nullptr)
    return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    const std::string operation(op);
    const json opts = parse(options_json, "options");
    const comag::BundlingModel& m = model->model;
    if (operation == "tstar") {
      comag::TstarVariant variant;
      variant.market_split = opts.value("variant", "market_split") == "market_split";
      variant.base = opts.value("base", 0);
      comag::TstarResult res = comag::find_tstar(m, variant);
      *report_out = dup_string(comag::tstar_to_json(res).dump(2));
      return res.ok ? COMAG_OK : COMAG_VERDICT_NEGATIVE;
    }
    if (operation == "pairs") {
      comag::JointlyOptimalPairs pairs =
          comag::jointly_optimal_pairs(m, opts.value("tie_tolerance", 1e-9));
      *report_out = dup_string(comag::pairs_to_json(pairs).dump(2));
      return pairs.empty_reported ? COMAG_VERDICT_NEGATIVE : COMAG_OK;
    }
    if (operation == "split-check") {
      comag::PricedMenu m1 = comag::priced_menu_from_json(opts.at("menu1"));
      comag::PricedMenu m2 = comag::priced_menu_from_json(opts.at("menu2"));
      comag::MarketSplitReport report =
          comag::check_market_splitting(m, m1, m2, opts.value("price_tolerance", 1e-9));
      *report_out = dup_string(comag::market_split_to_json(report).dump(2));
      return report.pass ? COMAG_OK : COMAG_VERDICT_NEGATIVE;
    }
    if (operation == "split-build") {
      auto menus = comag::build_market_splitting(m, opts.at("bundles1").get<std::vector<int>>(),
                                                 opts.at("bundles2").get<std::vector<int>>());
      json j{{"menu1", comag::priced_menu_to_json(menus.first)},
             {"menu2", comag::priced_menu_to_json(menus.second)}};
      *report_out = dup_string(j.dump(2));
      return COMAG_OK;
    }
    if (operation == "build-upgrades") {
      comag::UpgradeMenuResult res = comag::build_base_plus_upgrades(m, opts.at("base").get<int>());
      *report_out = dup_string(comag::upgrade_menu_to_json(res).dump(2));
      return res.ok ? COMAG_OK : COMAG_VERDICT_NEGATIVE;
    }
    if (operation == "mdstar") {
      comag::MdStarReport report =
          comag::check_md_star(m, opts.at("base").get<int>(), opts.value("tolerance", 1e-9));
      *report_out = dup_string(comag::md_star_to_json(report).dump(2));
      return report.pass ? COMAG_OK : COMAG_VERDICT_NEGATIVE;
    }
    return fail(COMAG_ERR_USAGE,
                "op must be tstar|pairs|split-check|split-build|build-upgrades|mdstar");
  });
}

/* ----- envelope numerics ----- */

comag_status comag_envelope_audit(const char* family_json, const char* options_json,
                                  char** report_out) {
  if (family_json == nullptr || report_out == nullptr)
    return fail(COMAG_ERR_USAGE, "null argument");
  return guarded([&]() -> comag_status {
    const json fam = parse(family_json, "family");
    const json opts = parse(options_json, "options");
    comag::SampledFamily family = comag::family_from_json(fam);
    comag::EnvelopeAudit audit =
        comag::upper_envelope(family, opts.value("tie_tolerance", 1e-12));
    const std::string op = opts.value("op", "audit");
    json j = comag::envelope_audit_to_json(audit);
    bool pass = true;
    if (op == "audit") {
      comag::KinkAuditResult res = comag::kink_audit(audit, opts.value("tolerance", 1e-9));
      j["kink_audit_pass"] = res.pass;
      pass = res.pass;
    } else if (op == "integral") {
      comag::IntegralCheckResult res = comag::envelope_integral_check(family, audit);
      j["max_abs_residual"] = res.max_abs_residual;
      pass = res.max_abs_residual <= opts.value("tolerance", 1e-6);
      j["integral_pass"] = pass;
    } else if (op == "lipschitz") {
      comag::LipschitzAuditResult res =
          comag::lipschitz_audit(family, audit, opts.value("tolerance", 1e-9));
      j["envelope_quotient"] = res.envelope_quotient;
      j["member_bound"] = res.member_bound;
      j["lipschitz_pass"] = res.pass;
      pass = res.pass;
    } else {
      return fail(COMAG_ERR_USAGE, "op must be audit|integral|lipschitz");
    }
    *report_out = dup_string(j.dump(2));
    return pass ? COMAG_OK : COMAG_VERDICT_NEGATIVE;
  });
}

}  // extern "C"
