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

#include "core/game.hpp"

#include <algorithm>

#include <json.hpp>

namespace comag {

using nlohmann::json;

int FiniteGame::outcome_index(int i, const std::string& label) const {
  const auto& labels = outcome_labels[i];
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end())
    throw GameFormatError("unknown outcome '" + label + "' for principal " + principals[i]);
  return static_cast<int>(it - labels.begin());
}

int FiniteGame::type_index(const std::string& label) const {
  auto it = std::find(type_labels.begin(), type_labels.end(), label);
  if (it == type_labels.end()) throw GameFormatError("unknown type '" + label + "'");
  return static_cast<int>(it - type_labels.begin());
}

std::vector<int> menu_elements(Menu m) {
  std::vector<int> out;
  for (int k = 0; m; ++k, m >>= 1)
    if (m & 1) out.push_back(k);
  return out;
}

int menu_size(Menu m) { return static_cast<int>(__builtin_popcountll(m)); }

MenuProfile augment_with_outside(const FiniteGame& game, const MenuProfile& mp) {
  MenuProfile out = mp;
  if (game.outside == OutsideKind::delegated)
    for (int i = 0; i < game.n(); ++i) out[i] |= Menu{1} << game.outside_option[i];
  return out;
}

namespace {

// Enumerates the product of menus, calling fn with each outcome profile.
template <typename Fn>
void for_each_profile(const FiniteGame& game, const MenuProfile& mp, Fn&& fn) {
  const int n = game.n();
  std::vector<std::vector<int>> items(n);
  for (int i = 0; i < n; ++i) {
    items[i] = menu_elements(mp[i]);
    if (items[i].empty()) return;  // empty product
  }
  OutcomeProfile o(n);
  std::vector<int> pos(n, 0);
  for (;;) {
    for (int i = 0; i < n; ++i) o[i] = items[i][pos[i]];
    fn(o);
    int i = 0;
    while (i < n && ++pos[i] == static_cast<int>(items[i].size())) pos[i++] = 0;
    if (i == n) break;
  }
}

}  // namespace

NodeChoices node_choice_set(const FiniteGame& game, const MenuProfile& mp, int t) {
  const MenuProfile effective =
      game.outside == OutsideKind::delegated ? augment_with_outside(game, mp) : mp;
  NodeChoices res;
  bool first = true;
  for_each_profile(game, effective, [&](const OutcomeProfile& o) {
    const Rational& v = game.agent_value(o, t);
    if (first || v > res.max_value) {
      res.max_value = v;
      res.atoms.clear();
      first = false;
    }
    if (v == res.max_value) res.atoms.push_back(Choice{false, o});
  });
  if (first) throw GameFormatError("empty menu product at agent node");
  if (game.outside == OutsideKind::intrinsic && res.max_value < 0) {
    res.atoms.assign(1, Choice{true, {}});
  }
  return res;
}

bool choice_dist_is_optimal(const FiniteGame& game, const MenuProfile& mp, int t,
                            const ChoiceDist& dist) {
  NodeChoices allowed = node_choice_set(game, mp, t);
  Rational total = 0;
  for (const auto& [choice, w] : dist.atoms) {
    if (w < 0) return false;
    total += w;
    if (std::find(allowed.atoms.begin(), allowed.atoms.end(), choice) == allowed.atoms.end())
      return false;
  }
  return total == 1;
}

std::optional<ChoiceDist> resolve_choice(const FiniteGame& game, const AgentStrategy& s,
                                         const MenuProfile& mp, int t) {
  if (const StrategyEntry* e = s.find(mp, t)) return e->dist;

  int deviator = -1;
  if (s.adversarial_reference && s.adversarial_reference->size() == mp.size()) {
    int differing = 0;
    for (size_t i = 0; i < mp.size(); ++i)
      if ((*s.adversarial_reference)[i] != mp[i]) {
        ++differing;
        deviator = static_cast<int>(i);
      }
    if (differing != 1) deviator = -1;
    if (!s.lexicographic_default && differing == 0) return std::nullopt;
  } else if (!s.lexicographic_default) {
    return std::nullopt;
  }

  NodeChoices c = node_choice_set(game, mp, t);
  const Choice* picked = nullptr;
  for (const Choice& atom : c.atoms) {
    if (!picked) {
      picked = &atom;
      continue;
    }
    if (deviator >= 0) {
      Rational cur = picked->quit ? Rational(0) : game.principal_value(deviator, picked->outcome, t);
      Rational alt = atom.quit ? Rational(0) : game.principal_value(deviator, atom.outcome, t);
      if (alt < cur || (alt == cur && atom < *picked)) picked = &atom;
    } else if (atom < *picked) {
      picked = &atom;
    }
  }
  ChoiceDist d;
  d.atoms.emplace_back(*picked, Rational(1));
  return d;
}

Rational dist_principal_payoff(const FiniteGame& game, int i, const ChoiceDist& dist, int t) {
  Rational total = 0;
  for (const auto& [choice, w] : dist.atoms) {
    if (choice.quit) continue;  // reservation payoff 0
    total += w * game.principal_value(i, choice.outcome, t);
  }
  return total;
}

Rational expected_principal_payoff(const FiniteGame& game, int i, const AgentStrategy& s,
                                   const MenuProfile& mp) {
  Rational total = 0;
  for (int t = 0; t < game.num_types(); ++t) {
    auto dist = resolve_choice(game, s, mp, t);
    if (!dist)
      throw GameFormatError("agent strategy undefined at (profile, type '" +
                            game.type_labels[t] + "')");
    total += game.type_prob[t] * dist_principal_payoff(game, i, *dist, t);
  }
  return total;
}

MenuProfile menus_of(const std::vector<DirectMechanism>& mechs) {
  MenuProfile mp(mechs.size());
  for (const auto& m : mechs) mp[m.principal] = m.induced_menu();
  return mp;
}

namespace {

Rational parse_value(const json& j, const char* where) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) {
    auto r = rat_parse(j.get<std::string>());
    if (r) return *r;
  }
  throw GameFormatError(std::string("invalid rational in ") + where);
}

}  // namespace

FiniteGame load_game(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw GameFormatError(std::string("game document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw GameFormatError("game document must be a JSON object");

  FiniteGame g;
  for (const char* key : {"principals", "types", "outcomes", "agent_utility", "principal_utility"})
    if (!doc.contains(key)) throw GameFormatError(std::string("missing field '") + key + "'");

  for (const auto& p : doc["principals"]) g.principals.push_back(p.get<std::string>());
  if (g.principals.empty()) throw GameFormatError("at least one principal required");

  for (const auto& t : doc["types"]) {
    g.type_labels.push_back(t.at("label").get<std::string>());
    g.type_prob.push_back(parse_value(t.at("prob"), "types[].prob"));
  }
  if (g.type_labels.empty()) throw GameFormatError("at least one type required");
  Rational prob_sum = 0;
  for (const auto& p : g.type_prob) {
    if (p < 0) throw GameFormatError("negative type probability");
    prob_sum += p;
  }
  if (prob_sum != 1)
    throw GameFormatError("type distribution sums to " + rat_to_string(prob_sum) +
                          ", expected 1");

  g.outcome_labels.resize(g.principals.size());
  for (int i = 0; i < g.n(); ++i) {
    const auto& arr = doc["outcomes"].at(g.principals[i]);
    for (const auto& o : arr) g.outcome_labels[i].push_back(o.get<std::string>());
    if (g.outcome_labels[i].empty())
      throw GameFormatError("principal " + g.principals[i] + " has no outcomes");
    if (g.num_outcomes(i) > 62)
      throw GameFormatError("outcome sets larger than 62 are not supported");
  }

  const int T = g.num_types();
  const long long P = g.profile_count();

  g.agent_table.assign(P * T, Rational());
  std::vector<char> seen(P * T, 0);
  for (const auto& row : doc["agent_utility"]) {
    const auto& prof = row.at("profile");
    if (static_cast<int>(prof.size()) != g.n())
      throw GameFormatError("agent_utility profile arity mismatch");
    OutcomeProfile o(g.n());
    for (int i = 0; i < g.n(); ++i) o[i] = g.outcome_index(i, prof[i].get<std::string>());
    int t = g.type_index(row.at("type").get<std::string>());
    long long idx = g.profile_index(o) * T + t;
    if (seen[idx]) throw GameFormatError("duplicate agent_utility entry");
    seen[idx] = 1;
    g.agent_table[idx] = parse_value(row.at("value"), "agent_utility[].value");
  }
  for (long long idx = 0; idx < P * T; ++idx)
    if (!seen[idx])
      throw GameFormatError("agent_utility table incomplete (missing entry)");

  const auto& pu = doc["principal_utility"];
  std::string mode = pu.contains("mode") ? pu.at("mode").get<std::string>() : "independent";
  if (mode != "independent" && mode != "general")
    throw GameFormatError("principal_utility.mode must be 'independent' or 'general'");
  g.independent_payoffs = (mode == "independent");

  g.principal_table.resize(g.n());
  if (g.independent_payoffs) {
    for (int i = 0; i < g.n(); ++i)
      g.principal_table[i].assign(static_cast<long long>(g.num_outcomes(i)) * T, Rational());
    // Full-profile rows are accepted in independent mode but must be constant
    // across rivals' outcomes.
    std::vector<std::vector<char>> pseen(g.n());
    for (int i = 0; i < g.n(); ++i) pseen[i].assign(g.num_outcomes(i) * T, 0);
    for (const auto& row : pu.at("rows")) {
      const std::string pid = row.at("principal").get<std::string>();
      auto pit = std::find(g.principals.begin(), g.principals.end(), pid);
      if (pit == g.principals.end()) throw GameFormatError("unknown principal '" + pid + "'");
      int i = static_cast<int>(pit - g.principals.begin());
      const auto& prof = row.at("profile");
      int t = g.type_index(row.at("type").get<std::string>());
      Rational v = parse_value(row.at("value"), "principal_utility.rows[].value");
      int oi;
      if (prof.size() == 1) {
        oi = g.outcome_index(i, prof[0].get<std::string>());
      } else if (static_cast<int>(prof.size()) == g.n()) {
        oi = g.outcome_index(i, prof[i].get<std::string>());
      } else {
        throw GameFormatError("principal_utility profile arity mismatch");
      }
      long long idx = static_cast<long long>(oi) * T + t;
      if (pseen[i][idx]) {
        if (g.principal_table[i][idx] != v)
          throw GameFormatError("independent-mode table for principal " + pid +
                                " varies with rival outcomes");
      } else {
        pseen[i][idx] = 1;
        g.principal_table[i][idx] = v;
      }
    }
    for (int i = 0; i < g.n(); ++i)
      for (long long idx = 0; idx < static_cast<long long>(g.num_outcomes(i)) * T; ++idx)
        if (!pseen[i][idx])
          throw GameFormatError("principal_utility table incomplete for principal " +
                                g.principals[i]);
  } else {
    for (int i = 0; i < g.n(); ++i) g.principal_table[i].assign(P * T, Rational());
    std::vector<std::vector<char>> pseen(g.n());
    for (int i = 0; i < g.n(); ++i) pseen[i].assign(P * T, 0);
    for (const auto& row : pu.at("rows")) {
      const std::string pid = row.at("principal").get<std::string>();
      auto pit = std::find(g.principals.begin(), g.principals.end(), pid);
      if (pit == g.principals.end()) throw GameFormatError("unknown principal '" + pid + "'");
      int i = static_cast<int>(pit - g.principals.begin());
      const auto& prof = row.at("profile");
      if (static_cast<int>(prof.size()) != g.n())
        throw GameFormatError("general-mode principal_utility rows need full profiles");
      OutcomeProfile o(g.n());
      for (int k = 0; k < g.n(); ++k) o[k] = g.outcome_index(k, prof[k].get<std::string>());
      int t = g.type_index(row.at("type").get<std::string>());
      long long idx = g.profile_index(o) * T + t;
      if (pseen[i][idx]) throw GameFormatError("duplicate principal_utility entry");
      pseen[i][idx] = 1;
      g.principal_table[i][idx] = parse_value(row.at("value"), "principal_utility value");
    }
    for (int i = 0; i < g.n(); ++i)
      for (long long idx = 0; idx < P * T; ++idx)
        if (!pseen[i][idx])
          throw GameFormatError("principal_utility table incomplete for principal " +
                                g.principals[i]);
  }

  if (doc.contains("outside")) {
    const auto& out = doc["outside"];
    const std::string kind = out.at("kind").get<std::string>();
    if (kind == "intrinsic") {
      g.outside = OutsideKind::intrinsic;
    } else if (kind == "delegated") {
      g.outside = OutsideKind::delegated;
      g.outside_option.resize(g.n());
      const auto& opts = out.at("options");
      for (int i = 0; i < g.n(); ++i)
        g.outside_option[i] = g.outcome_index(i, opts.at(g.principals[i]).get<std::string>());
    } else {
      throw GameFormatError("outside.kind must be 'intrinsic' or 'delegated'");
    }
  }
  return g;
}

std::string serialize_game(const FiniteGame& g) {
  json doc;
  doc["principals"] = g.principals;
  doc["types"] = json::array();
  for (int t = 0; t < g.num_types(); ++t)
    doc["types"].push_back({{"label", g.type_labels[t]}, {"prob", rat_to_string(g.type_prob[t])}});
  doc["outcomes"] = json::object();
  for (int i = 0; i < g.n(); ++i) doc["outcomes"][g.principals[i]] = g.outcome_labels[i];

  doc["agent_utility"] = json::array();
  for (long long p = 0; p < g.profile_count(); ++p) {
    OutcomeProfile o = g.profile_at(p);
    json labels = json::array();
    for (int i = 0; i < g.n(); ++i) labels.push_back(g.outcome_labels[i][o[i]]);
    for (int t = 0; t < g.num_types(); ++t)
      doc["agent_utility"].push_back({{"profile", labels},
                                      {"type", g.type_labels[t]},
                                      {"value", rat_to_string(g.agent_table[p * g.num_types() + t])}});
  }

  json rows = json::array();
  if (g.independent_payoffs) {
    for (int i = 0; i < g.n(); ++i)
      for (int oi = 0; oi < g.num_outcomes(i); ++oi)
        for (int t = 0; t < g.num_types(); ++t)
          rows.push_back({{"principal", g.principals[i]},
                          {"profile", json::array({g.outcome_labels[i][oi]})},
                          {"type", g.type_labels[t]},
                          {"value", rat_to_string(g.own_value(i, oi, t))}});
  } else {
    for (int i = 0; i < g.n(); ++i)
      for (long long p = 0; p < g.profile_count(); ++p) {
        OutcomeProfile o = g.profile_at(p);
        json labels = json::array();
        for (int k = 0; k < g.n(); ++k) labels.push_back(g.outcome_labels[k][o[k]]);
        for (int t = 0; t < g.num_types(); ++t)
          rows.push_back({{"principal", g.principals[i]},
                          {"profile", labels},
                          {"type", g.type_labels[t]},
                          {"value", rat_to_string(g.principal_table[i][p * g.num_types() + t])}});
      }
  }
  doc["principal_utility"] = {{"mode", g.independent_payoffs ? "independent" : "general"},
                              {"rows", rows}};

  if (g.outside == OutsideKind::intrinsic) {
    doc["outside"] = {{"kind", "intrinsic"}};
  } else if (g.outside == OutsideKind::delegated) {
    json opts = json::object();
    for (int i = 0; i < g.n(); ++i)
      opts[g.principals[i]] = g.outcome_labels[i][g.outside_option[i]];
    doc["outside"] = {{"kind", "delegated"}, {"options", opts}};
  }
  return doc.dump(2);
}

}  // namespace comag
