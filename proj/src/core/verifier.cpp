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

#include "core/verifier.hpp"

#include <algorithm>
#include <map>

#include "core/assembly.hpp"

namespace comag {

namespace {

std::string node_name(const FiniteGame& game, const MenuProfile& mp, int t) {
  std::string s = "(";
  for (int i = 0; i < game.n(); ++i) {
    if (i) s += " x ";
    s += "{";
    bool first = true;
    for (int o : menu_elements(mp[i])) {
      if (!first) s += ",";
      s += game.outcome_labels[i][o];
      first = false;
    }
    s += "}";
  }
  s += ", " + game.type_labels[t] + ")";
  return s;
}

}  // namespace

AgentStrategy construct_agent_strategy(const FiniteGame& game,
                                       const std::vector<DirectMechanism>& mechanisms) {
  CompatibilityVariant variant = CompatibilityVariant::upr;
  if (game.outside == OutsideKind::intrinsic) variant = CompatibilityVariant::upr_i;
  if (game.outside == OutsideKind::delegated) variant = CompatibilityVariant::upr_d;
  CompatibilityReport report = check_compatibility(game, mechanisms, variant);
  if (!report.pass)
    throw GameFormatError("no on-path assignment exists: compatibility fails at type '" +
                          game.type_labels[report.violating_type] + "'");

  AgentStrategy strategy;
  MenuProfile on_path = menus_of(mechanisms);
  strategy.adversarial_reference = on_path;
  for (int t = 0; t < game.num_types(); ++t) {
    ChoiceDist d;
    d.atoms.emplace_back(report.witness[t], Rational(1));
    strategy.set(on_path, t, std::move(d), TieBreakPolicy::on_path_upr);
  }
  return strategy;
}

EquilibriumCertificate verify_pbe(const FiniteGame& game, const MenuProfile& profile,
                                  const AgentStrategy& strategy) {
  EquilibriumCertificate cert;
  cert.profile = profile;
  const int T = game.num_types();

  auto audited_payoff = [&](int i, const MenuProfile& node) -> Rational {
    Rational total = 0;
    for (int t = 0; t < T; ++t) {
      auto dist = resolve_choice(game, strategy, node, t);
      if (!dist)
        throw GameFormatError("strategy undefined at node " + node_name(game, node, t));
      if (!choice_dist_is_optimal(game, node, t, *dist)) {
        cert.failure = "agent choice fails optimality at node " + node_name(game, node, t);
        return total;
      }
      total += game.type_prob[t] * dist_principal_payoff(game, i, *dist, t);
    }
    return total;
  };

  cert.equilibrium_payoff.resize(game.n());
  for (int i = 0; i < game.n(); ++i) {
    cert.equilibrium_payoff[i] = audited_payoff(i, profile);
    if (!cert.failure.empty()) return cert;
  }

  cert.is_pbe = true;
  for (int i = 0; i < game.n(); ++i) {
    const Menu full = game.full_menu(i);
    for (Menu s = 1; s <= full; ++s) {
      if (s == profile[i]) continue;
      MenuProfile node = profile;
      node[i] = s;
      DeviationRecord rec;
      rec.principal = i;
      rec.menu = s;
      rec.payoff = audited_payoff(i, node);
      if (!cert.failure.empty()) {
        cert.is_pbe = false;
        return cert;
      }
      if (rec.payoff > cert.equilibrium_payoff[i] && !cert.profitable_deviation) {
        cert.is_pbe = false;
        cert.profitable_deviation = rec;
      }
      cert.deviations.push_back(std::move(rec));
    }
  }
  return cert;
}

// ----- Fourier-Motzkin over exact rationals -----

namespace {

struct Row {
  std::vector<Rational> coeff;
  Rational rhs;
  std::string label;
  // provenance of derived rows
  int parent_upper = -1, parent_lower = -1;
  int eliminated_var = -1;
};

bool row_is_constant(const Row& r) {
  return std::all_of(r.coeff.begin(), r.coeff.end(), [](const Rational& c) { return c == 0; });
}

struct FmResult {
  bool feasible = true;
  std::vector<Rational> assignment;
  std::optional<ContradictionTrace> contradiction;
};

FmResult fourier_motzkin(std::vector<Row> rows, int num_vars,
                         const std::vector<std::string>& var_names) {
  FmResult result;
  std::vector<char> alive(num_vars, 1);
  struct Step {
    int var;
    std::vector<Row> rows_before;
  };
  std::vector<Step> steps;

  auto check_constants = [&](const std::vector<Row>& rs) -> bool {
    for (const Row& r : rs) {
      if (!row_is_constant(r)) continue;
      if (r.rhs < 0) {
        ContradictionTrace trace;
        trace.gap = r.rhs;
        if (r.eliminated_var >= 0) {
          trace.variable = var_names[r.eliminated_var];
          trace.upper_label = r.label;  // filled below from parents
        } else {
          trace.lower_label = trace.upper_label = r.label;
        }
        result.feasible = false;
        result.contradiction = std::move(trace);
        return false;
      }
    }
    return true;
  };

  // Parents of the violated row give the contradictory bound pair.
  auto fill_parents = [&](const std::vector<Row>& rs, const Row& bad) {
    if (bad.parent_upper < 0) return;
    const Row& up = rs[bad.parent_upper];
    const Row& lo = rs[bad.parent_lower];
    // up: x_v <= rhs_up (+ other vars, already constant here); lo: -x_v <= rhs_lo
    result.contradiction->upper_bound = up.rhs;
    result.contradiction->lower_bound = -lo.rhs;
    result.contradiction->upper_label = up.label;
    result.contradiction->lower_label = lo.label;
  };

  std::vector<Row> current = std::move(rows);
  if (!check_constants(current)) {
    for (const Row& r : current)
      if (row_is_constant(r) && r.rhs < 0) fill_parents(current, r);
    return result;
  }

  for (;;) {
    // Pick the live variable minimizing the pos*neg fan-out; ties by index.
    int best_var = -1;
    long long best_cost = 0;
    for (int v = 0; v < num_vars; ++v) {
      if (!alive[v]) continue;
      long long pos = 0, neg = 0;
      for (const Row& r : current) {
        if (r.coeff[v] > 0) ++pos;
        else if (r.coeff[v] < 0) ++neg;
      }
      long long cost = pos * neg;
      if (best_var < 0 || cost < best_cost) {
        best_var = v;
        best_cost = cost;
      }
    }
    if (best_var < 0) break;
    alive[best_var] = 0;

    // Scale rows so the pivot coefficient is +-1.
    std::vector<Row> scaled = current;
    for (Row& r : scaled) {
      const Rational c = r.coeff[best_var];
      if (c == 0) continue;
      Rational m = c > 0 ? c : Rational(-c);
      for (auto& x : r.coeff) x /= m;
      r.rhs /= m;
    }
    steps.push_back(Step{best_var, scaled});

    std::vector<Row> next;
    std::vector<int> uppers, lowers;
    for (int k = 0; k < static_cast<int>(scaled.size()); ++k) {
      const Rational& c = scaled[k].coeff[best_var];
      if (c > 0) uppers.push_back(k);
      else if (c < 0) lowers.push_back(k);
      else next.push_back(scaled[k]);
    }
    for (int u : uppers)
      for (int l : lowers) {
        Row combined;
        combined.coeff.resize(num_vars);
        for (int v = 0; v < num_vars; ++v)
          combined.coeff[v] = scaled[u].coeff[v] + scaled[l].coeff[v];
        combined.rhs = scaled[u].rhs + scaled[l].rhs;
        combined.label = "combine(" + scaled[u].label + ", " + scaled[l].label + ")";
        combined.parent_upper = u;
        combined.parent_lower = l;
        combined.eliminated_var = best_var;
        next.push_back(std::move(combined));
      }

    for (const Row& r : next) {
      if (row_is_constant(r) && r.rhs < 0) {
        result.feasible = false;
        ContradictionTrace trace;
        trace.gap = r.rhs;
        trace.variable = r.eliminated_var >= 0 ? var_names[r.eliminated_var] : "";
        result.contradiction = std::move(trace);
        fill_parents(scaled, r);
        return result;
      }
    }
    current = std::move(next);
  }

  // Feasible: back-substitute through the recorded steps.
  result.assignment.assign(num_vars, Rational(0));
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    const int v = it->var;
    std::optional<Rational> lower, upper;
    for (const Row& r : it->rows_before) {
      const Rational& c = r.coeff[v];
      if (c == 0) continue;
      Rational bound = r.rhs;
      for (int w = 0; w < num_vars; ++w)
        if (w != v && r.coeff[w] != 0) bound -= r.coeff[w] * result.assignment[w];
      if (c > 0) {  // x_v <= bound
        if (!upper || bound < *upper) upper = bound;
      } else {  // -x_v <= bound, i.e. x_v >= -bound
        Rational lb = -bound;
        if (!lower || lb > *lower) lower = lb;
      }
    }
    Rational value = 0;
    if (lower && upper) value = (*lower + *upper) / 2;
    else if (lower) value = *lower;
    else if (upper) value = *upper;
    result.assignment[v] = value;
  }
  return result;
}

Rational atom_payoff(const FiniteGame& game, int i, const Choice& c, int t) {
  if (c.quit) return Rational(0);
  return game.principal_value(i, c.outcome, t);
}

}  // namespace

SupportResult support_feasibility(const FiniteGame& game, const MenuProfile& profile,
                                  int var_bound) {
  SupportResult res;
  FeasibilitySystem& sys = res.system;
  const int T = game.num_types();

  auto add_node = [&](const MenuProfile& mp, int t) -> int {
    FeasibilityNode node;
    node.profile = mp;
    node.type = t;
    node.atoms = node_choice_set(game, mp, t).atoms;
    if (node.atoms.size() >= 2) {
      node.var_base = sys.num_vars;
      sys.num_vars += static_cast<int>(node.atoms.size()) - 1;
      for (size_t k = 0; k + 1 < node.atoms.size(); ++k)
        sys.var_names.push_back("w[" + node_name(game, mp, t) + "#" + std::to_string(k) + "]");
    }
    sys.nodes.push_back(std::move(node));
    return static_cast<int>(sys.nodes.size()) - 1;
  };

  std::vector<int> on_path_nodes;
  for (int t = 0; t < T; ++t) on_path_nodes.push_back(add_node(profile, t));

  struct Deviation {
    int principal;
    Menu menu;
    std::vector<int> nodes;  // per type
  };
  std::vector<Deviation> deviations;
  for (int i = 0; i < game.n(); ++i) {
    const Menu full = game.full_menu(i);
    for (Menu s = 1; s <= full; ++s) {
      if (s == profile[i]) continue;
      MenuProfile node = profile;
      node[i] = s;
      Deviation d{i, s, {}};
      for (int t = 0; t < T; ++t) d.nodes.push_back(add_node(node, t));
      deviations.push_back(std::move(d));
    }
  }

  if (sys.num_vars > var_bound) {
    res.error = "free tie-breaking variables (" + std::to_string(sys.num_vars) +
                ") exceed the bound (" + std::to_string(var_bound) + ")";
    return res;
  }

  // Simplex rows per node: w_k >= 0 and sum w <= 1.
  for (const FeasibilityNode& node : sys.nodes) {
    if (node.var_base < 0) continue;
    const int k = static_cast<int>(node.atoms.size()) - 1;
    for (int j = 0; j < k; ++j) {
      LinearConstraint lc;
      lc.coeff.assign(sys.num_vars, Rational(0));
      lc.coeff[node.var_base + j] = -1;
      lc.rhs = 0;
      lc.label = sys.var_names[node.var_base + j] + " >= 0";
      sys.constraints.push_back(std::move(lc));
    }
    LinearConstraint lc;
    lc.coeff.assign(sys.num_vars, Rational(0));
    for (int j = 0; j < k; ++j) lc.coeff[node.var_base + j] = 1;
    lc.rhs = 1;
    lc.label = "simplex at " + node_name(game, node.profile, node.type);
    sys.constraints.push_back(std::move(lc));
  }

  // Node payoff as an affine function of the free weights: with atoms
  // a_1..a_m and weights w_1..w_{m-1}, payoff = U_m + sum_j w_j (U_j - U_m).
  auto accumulate_payoff = [&](int node_idx, int i, const Rational& scale,
                               std::vector<Rational>* coeff, Rational* constant) {
    const FeasibilityNode& node = sys.nodes[node_idx];
    const int t = node.type;
    const Rational last = atom_payoff(game, i, node.atoms.back(), t);
    *constant += scale * last;
    if (node.var_base < 0) return;
    for (size_t j = 0; j + 1 < node.atoms.size(); ++j)
      (*coeff)[node.var_base + j] += scale * (atom_payoff(game, i, node.atoms[j], t) - last);
  };

  for (const Deviation& d : deviations) {
    LinearConstraint lc;
    lc.coeff.assign(sys.num_vars, Rational(0));
    Rational constant = 0;  // deviation payoff - equilibrium payoff + constant <= 0
    for (int t = 0; t < T; ++t) {
      accumulate_payoff(d.nodes[t], d.principal, game.type_prob[t], &lc.coeff, &constant);
      Rational neg = -game.type_prob[t];
      accumulate_payoff(on_path_nodes[t], d.principal, neg, &lc.coeff, &constant);
    }
    lc.rhs = -constant;
    lc.label = "no profitable deviation: principal " + game.principals[d.principal] + " to " +
               node_name(game, [&] {
                 MenuProfile node = profile;
                 node[d.principal] = d.menu;
                 return node;
               }(), 0).substr(0, 0);
    // A readable label without the type suffix:
    {
      MenuProfile devp = profile;
      devp[d.principal] = d.menu;
      std::string menus = node_name(game, devp, 0);
      menus.resize(menus.rfind(','));
      lc.label = "principal " + game.principals[d.principal] + " deviation to " + menus + ")";
    }
    sys.constraints.push_back(std::move(lc));
  }

  std::vector<Row> rows;
  rows.reserve(sys.constraints.size());
  for (const LinearConstraint& lc : sys.constraints)
    rows.push_back(Row{lc.coeff, lc.rhs, lc.label, -1, -1, -1});

  FmResult fm = fourier_motzkin(std::move(rows), sys.num_vars, sys.var_names);
  res.feasible = fm.feasible;
  if (!fm.feasible) {
    res.contradiction = fm.contradiction;
    return res;
  }
  res.witness = fm.assignment;

  AgentStrategy strategy;
  strategy.adversarial_reference = profile;
  for (const FeasibilityNode& node : sys.nodes) {
    ChoiceDist dist;
    if (node.var_base < 0) {
      dist.atoms.emplace_back(node.atoms.front(), Rational(1));
    } else {
      Rational rest = 1;
      for (size_t j = 0; j + 1 < node.atoms.size(); ++j) {
        const Rational& w = fm.assignment[node.var_base + j];
        if (w != 0) dist.atoms.emplace_back(node.atoms[j], w);
        rest -= w;
      }
      if (rest != 0) dist.atoms.emplace_back(node.atoms.back(), rest);
    }
    strategy.set(node.profile, node.type, std::move(dist), TieBreakPolicy::adversarial_to_deviator);
  }
  res.strategy = std::move(strategy);
  return res;
}

IiaReport check_iia(const FiniteGame& game, const AgentStrategy& strategy, IiaVariant variant,
                    const std::vector<MenuProfile>& profiles) {
  IiaReport report;
  const int T = game.num_types();

  auto contains = [](const MenuProfile& small, const MenuProfile& big) {
    for (size_t i = 0; i < small.size(); ++i)
      if ((small[i] & big[i]) != small[i]) return false;
    return true;
  };
  auto in_product = [&](const Choice& c, const MenuProfile& mp) {
    if (c.quit) return true;
    for (size_t i = 0; i < mp.size(); ++i)
      if (!(mp[i] >> c.outcome[i] & 1)) return false;
    return true;
  };

  for (const MenuProfile& big : profiles) {
    for (const MenuProfile& small : profiles) {
      if (small == big || !contains(small, big)) continue;
      for (int t = 0; t < T; ++t) {
        auto big_dist = resolve_choice(game, strategy, big, t);
        auto small_dist = resolve_choice(game, strategy, small, t);
        if (!big_dist || !small_dist)
          throw GameFormatError("strategy undefined on a compared profile pair");

        Rational surviving = 0;
        bool all_survive = true;
        for (const auto& [choice, w] : big_dist->atoms) {
          if (in_product(choice, small)) surviving += w;
          else all_survive = false;
        }

        if (variant == IiaVariant::iia1) {
          if (!all_survive) continue;
          auto sorted = [](ChoiceDist d) {
            std::sort(d.atoms.begin(), d.atoms.end());
            return d.atoms;
          };
          if (sorted(*small_dist) != sorted(*big_dist)) {
            report.pass = false;
            report.violation = IiaViolation{big, small, t,
                                            "support survives the shrink but the choice changes"};
            return report;
          }
        } else {
          if (surviving == 0) continue;
          auto weight_in = [](const ChoiceDist& d, const Choice& c) {
            Rational w = 0;
            for (const auto& [choice, cw] : d.atoms)
              if (choice == c) w += cw;
            return w;
          };
          for (const auto& [choice, w] : big_dist->atoms) {
            if (!in_product(choice, small)) continue;
            Rational expected = w / surviving;
            if (weight_in(*small_dist, choice) != expected) {
              report.pass = false;
              report.violation =
                  IiaViolation{big, small, t,
                               "conditional rescaling fails: expected weight " +
                                   rat_to_string(expected) + " on a surviving outcome"};
              return report;
            }
          }
        }
      }
    }
  }
  return report;
}

}  // namespace comag
