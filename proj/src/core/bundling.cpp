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

#include "core/bundling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace comag {

using nlohmann::json;

double BundlingModel::U(int b1, int b2, double t) const {
  switch (preset) {
    case Preset::union_only:
      return t * g[b1 | b2];
    case Preset::union_minus_intersection:
      return t * (g[b1 | b2] - g[b1 & b2]);
    case Preset::union_with_premium:
      return t * g[b1 | b2] + premium_quad[b2] * t * t / 2 - premium_lin[b2] * t;
    case Preset::tabulated: {
      const auto& row = tab_values[static_cast<size_t>(b1) * num_bundles() + b2];
      if (t <= tab_grid.front()) return row.front();
      if (t >= tab_grid.back()) return row.back();
      auto it = std::upper_bound(tab_grid.begin(), tab_grid.end(), t);
      size_t k = static_cast<size_t>(it - tab_grid.begin());
      const double a = (t - tab_grid[k - 1]) / (tab_grid[k] - tab_grid[k - 1]);
      return row[k - 1] + a * (row[k] - row[k - 1]);
    }
  }
  return 0;
}

double BundlingModel::Ut(int b1, int b2, double t) const {
  switch (preset) {
    case Preset::union_only:
      return g[b1 | b2];
    case Preset::union_minus_intersection:
      return g[b1 | b2] - g[b1 & b2];
    case Preset::union_with_premium:
      return g[b1 | b2] + premium_quad[b2] * t - premium_lin[b2];
    case Preset::tabulated: {
      // Central differences on the tabulated grid.
      const auto& row = tab_values[static_cast<size_t>(b1) * num_bundles() + b2];
      size_t k = 0;
      while (k + 1 < tab_grid.size() && tab_grid[k + 1] < t) ++k;
      size_t lo = k > 0 ? k - 1 : k;
      size_t hi = std::min(k + 1, tab_grid.size() - 1);
      if (hi == lo) return 0;
      return (row[hi] - row[lo]) / (tab_grid[hi] - tab_grid[lo]);
    }
  }
  return 0;
}

std::vector<double> BundlingModel::make_grid(int n) const {
  if (n <= 0) n = grid_n;
  std::vector<double> grid(n);
  for (int k = 0; k < n; ++k) grid[k] = t_lo + (t_hi - t_lo) * k / (n - 1);
  return grid;
}

BundlingModel load_bundling_model(const std::string& json_text) {
  json doc = json::parse(json_text);
  BundlingModel m;
  m.goods = doc.at("goods").get<int>();
  if (m.goods < 0 || m.goods > 16) throw std::invalid_argument("goods must be in [0, 16]");

  const auto& val = doc.at("valuation");
  if (val.contains("tabulated")) {
    m.preset = BundlingModel::Preset::tabulated;
    m.tab_grid = val["tabulated"].at("t").get<std::vector<double>>();
    m.tab_values = val["tabulated"].at("U").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(m.tab_values.size()) != m.num_bundles() * m.num_bundles())
      throw std::invalid_argument("tabulated U needs one row per ordered bundle pair");
  } else {
    const std::string preset = val.at("preset").get<std::string>();
    if (preset == "union") m.preset = BundlingModel::Preset::union_only;
    else if (preset == "union_minus_intersection")
      m.preset = BundlingModel::Preset::union_minus_intersection;
    else if (preset == "union_with_premium") m.preset = BundlingModel::Preset::union_with_premium;
    else throw std::invalid_argument("unknown valuation preset '" + preset + "'");
    m.g = val.at("g").get<std::vector<double>>();
    if (static_cast<int>(m.g.size()) != m.num_bundles())
      throw std::invalid_argument("g must list one value per bundle bitmask");
    // Strict monotonicity in set inclusion over all subset pairs.
    for (int b = 0; b < m.num_bundles(); ++b)
      for (int c = 0; c < m.num_bundles(); ++c)
        if ((b & c) == b && b != c && !(m.g[b] < m.g[c]))
          throw std::invalid_argument("g must be strictly increasing in set inclusion");
    if (m.preset == BundlingModel::Preset::union_with_premium) {
      m.premium_quad = val.value("premium_quad", std::vector<double>(m.num_bundles(), 0.0));
      m.premium_lin = val.value("premium_lin", std::vector<double>(m.num_bundles(), 0.0));
      if (static_cast<int>(m.premium_quad.size()) != m.num_bundles() ||
          static_cast<int>(m.premium_lin.size()) != m.num_bundles())
        throw std::invalid_argument("premium arrays must list one value per bundle");
    }
  }

  const auto& dist = doc.at("distribution");
  if (dist.at("preset").get<std::string>() != "uniform")
    throw std::invalid_argument("only the uniform distribution preset is supported");
  m.t_lo = dist.at("lo").get<double>();
  m.t_hi = dist.at("hi").get<double>();
  if (!(m.t_lo < m.t_hi)) throw std::invalid_argument("type interval must be nondegenerate");

  m.price_cap = doc.value("price_cap", 1e9);
  m.grid_n = doc.value("grid", 1001);
  if (m.grid_n < 3) throw std::invalid_argument("grid must have at least 3 points");
  return m;
}

namespace {

double max_gross(const BundlingModel& m, double t) {
  double best = m.U(0, 0, t);
  for (int b1 = 0; b1 < m.num_bundles(); ++b1)
    for (int b2 = 0; b2 < m.num_bundles(); ++b2) best = std::max(best, m.U(b1, b2, t));
  return best;
}

double max_virtual(const BundlingModel& m, double t) {
  double best = m.virtual_surplus(0, 0, t);
  for (int b1 = 0; b1 < m.num_bundles(); ++b1)
    for (int b2 = 0; b2 < m.num_bundles(); ++b2)
      best = std::max(best, m.virtual_surplus(b1, b2, t));
  return best;
}

}  // namespace

TstarResult find_tstar(const BundlingModel& model, const TstarVariant& variant,
                       double residual_tol) {
  TstarResult result;
  // D(t) = half gross value - virtual surplus; the cutoff is its root.
  auto D = [&](double t) {
    if (variant.market_split) return 0.5 * max_gross(model, t) - max_virtual(model, t);
    const int b = variant.base;
    const int comp = model.full_bundle() & ~b;
    return 0.5 * model.U(b, comp, t) - model.virtual_surplus(b, comp, t);
  };

  const auto grid = model.make_grid();
  for (size_t k = 0; k + 1 < grid.size(); ++k)
    if (D(grid[k + 1]) > D(grid[k]) + residual_tol) {
      result.monotone = false;
      result.error = "the cutoff equation is not monotone on the grid";
      return result;
    }

  double lo = model.t_lo, hi = model.t_hi;
  const double d_lo = D(lo), d_hi = D(hi);
  if (d_lo <= 0) {
    result.ok = true;
    result.tstar = lo;  // boundary root: construction starts at the bottom type
    result.residual = d_lo;
  } else if (d_hi > 0) {
    result.error = "no sign change: the market-splitting construction is inapplicable";
    return result;
  } else {
    for (int iter = 0; iter < 200 && hi - lo > 0; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (D(mid) > 0) lo = mid;
      else hi = mid;
      if (std::fabs(D(0.5 * (lo + hi))) <= residual_tol) break;
    }
    result.ok = true;
    result.tstar = 0.5 * (lo + hi);
    result.residual = D(result.tstar);
  }
  if (variant.market_split) {
    result.lhs = 0.5 * max_gross(model, result.tstar);
    result.rhs = max_virtual(model, result.tstar);
  } else {
    const int comp = model.full_bundle() & ~variant.base;
    result.lhs = 0.5 * model.U(variant.base, comp, result.tstar);
    result.rhs = model.virtual_surplus(variant.base, comp, result.tstar);
  }
  return result;
}

JointlyOptimalPairs jointly_optimal_pairs(const BundlingModel& model, double tie_tolerance) {
  JointlyOptimalPairs result;
  const int B = model.num_bundles();
  std::vector<char> in(B * B, 1);
  const auto grid = model.make_grid();
  for (double t : grid) {
    double best_u = max_gross(model, t);
    double best_v = max_virtual(model, t);
    const double tol_u = tie_tolerance * std::max(1.0, std::fabs(best_u));
    const double tol_v = tie_tolerance * std::max(1.0, std::fabs(best_v));
    for (int b1 = 0; b1 < B; ++b1)
      for (int b2 = 0; b2 < B; ++b2) {
        if (best_u - model.U(b1, b2, t) > tol_u) in[b1 * B + b2] = 0;
        if (best_v - model.virtual_surplus(b1, b2, t) > tol_v) in[b1 * B + b2] = 0;
      }
  }
  for (int b1 = 0; b1 < B; ++b1)
    for (int b2 = 0; b2 < B; ++b2)
      if (in[b1 * B + b2]) result.pairs.emplace_back(b1, b2);
  result.empty_reported = result.pairs.empty();
  return result;
}

namespace {

void require_no_duplicates(const PricedMenu& menu) {
  for (size_t a = 0; a < menu.items.size(); ++a)
    for (size_t b = a + 1; b < menu.items.size(); ++b)
      if (menu.items[a].first == menu.items[b].first)
        throw std::invalid_argument("a bundle appears twice in a menu");
}

}  // namespace

MarketSplitReport check_market_splitting(const BundlingModel& model, const PricedMenu& menu1,
                                         const PricedMenu& menu2, double price_tol) {
  require_no_duplicates(menu1);
  require_no_duplicates(menu2);
  MarketSplitReport report;
  TstarResult ts = find_tstar(model, TstarVariant{true, 0});
  if (!ts.ok) {
    report.violation = ts.error;
    return report;
  }
  report.tstar = ts.tstar;
  report.expected_price = 0.5 * max_gross(model, ts.tstar);

  JointlyOptimalPairs jop = jointly_optimal_pairs(model);
  auto jointly = [&](int b1, int b2) {
    return std::find(jop.pairs.begin(), jop.pairs.end(), std::make_pair(b1, b2)) !=
           jop.pairs.end();
  };

  for (const auto& [b, p] : menu1.items) {
    bool matched = false;
    for (const auto& [b2, p2] : menu2.items)
      if (jointly(b, b2)) matched = true;
    if (!matched) {
      report.violation = "bundle " + std::to_string(b) +
                         " in the first menu has no jointly optimal partner in the second";
      return report;
    }
  }
  for (const auto& [b2, p2] : menu2.items) {
    bool matched = false;
    for (const auto& [b, p] : menu1.items)
      if (jointly(b, b2)) matched = true;
    if (!matched) {
      report.violation = "bundle " + std::to_string(b2) +
                         " in the second menu has no jointly optimal partner in the first";
      return report;
    }
  }
  for (const PricedMenu* menu : {&menu1, &menu2})
    for (const auto& [b, p] : menu->items)
      if (std::fabs(p - report.expected_price) > price_tol) {
        report.violation = "price " + std::to_string(p) + " on bundle " + std::to_string(b) +
                           " differs from the common markup";
        return report;
      }
  report.pass = true;
  return report;
}

std::pair<PricedMenu, PricedMenu> build_market_splitting(const BundlingModel& model,
                                                         const std::vector<int>& bundles1,
                                                         const std::vector<int>& bundles2) {
  TstarResult ts = find_tstar(model, TstarVariant{true, 0});
  if (!ts.ok) throw std::invalid_argument(ts.error);
  const double price = 0.5 * max_gross(model, ts.tstar);
  PricedMenu m1, m2;
  for (int b : bundles1) m1.items.emplace_back(b, price);
  for (int b : bundles2) m2.items.emplace_back(b, price);
  return {m1, m2};
}

ParticipationAudit market_split_participation_audit(const BundlingModel& model,
                                                    const PricedMenu& menu1,
                                                    const PricedMenu& menu2, double tol) {
  ParticipationAudit audit;
  TstarResult ts = find_tstar(model, TstarVariant{true, 0});
  if (!ts.ok) return audit;

  auto best_surplus = [&](double t) {
    double best = -1e300;
    for (const auto& [b1, p1] : menu1.items)
      for (const auto& [b2, p2] : menu2.items)
        best = std::max(best, model.U(b1, b2, t) - p1 - p2);
    return best;
  };

  bool first_in = true, first_out = true;
  for (double t : model.make_grid()) {
    const double s = best_surplus(t);
    if (t >= ts.tstar - tol) {
      if (first_in || s < audit.worst_in_margin) audit.worst_in_margin = s;
      first_in = false;
    } else {
      if (first_out || s > audit.worst_out_margin) audit.worst_out_margin = s;
      first_out = false;
    }
  }
  audit.pass = audit.worst_in_margin >= -tol && (first_out || audit.worst_out_margin < 0);
  return audit;
}

MdStarReport check_md_star(const BundlingModel& model, int base, double tol) {
  MdStarReport report;
  const int B = model.num_bundles();
  const auto grid = model.make_grid();
  for (int b = 0; b < B; ++b)
    for (int c = b + 1; c < B; ++c) {
      double up = 0, down = 0;
      for (size_t k = 0; k + 1 < grid.size(); ++k) {
        const double d0 = model.virtual_surplus(base, b, grid[k]) -
                          model.virtual_surplus(base, c, grid[k]);
        const double d1 = model.virtual_surplus(base, b, grid[k + 1]) -
                          model.virtual_surplus(base, c, grid[k + 1]);
        const double inc = d1 - d0;
        if (inc > 0) up = std::max(up, inc);
        else down = std::max(down, -inc);
      }
      if (up > tol && down > tol) {
        report.pass = false;
        const double reversal = std::min(up, down);
        report.violations.push_back({b, c, reversal});
        report.worst_reversal = std::max(report.worst_reversal, reversal);
      }
    }
  return report;
}

UpgradeMenuResult build_base_plus_upgrades(const BundlingModel& model, int base) {
  UpgradeMenuResult result;
  MdStarReport md = check_md_star(model, base);
  if (!md.pass) {
    result.error = "virtual-surplus differences are not monotone (worst reversal " +
                   std::to_string(md.worst_reversal) + ")";
    return result;
  }
  TstarResult ts = find_tstar(model, TstarVariant{false, base});
  if (!ts.ok) {
    result.error = ts.error;
    return result;
  }
  result.tstar = ts.tstar;
  const int comp = model.full_bundle() & ~base;

  // Pointwise argmax of the base-conditional virtual surplus for t >= t*.
  const auto grid = model.make_grid();
  auto leader_at = [&](double t) {
    int best = 0;
    double best_v = model.virtual_surplus(base, 0, t);
    for (int b = 1; b < model.num_bundles(); ++b) {
      const double v = model.virtual_surplus(base, b, t);
      if (v > best_v) {
        best_v = v;
        best = b;
      }
    }
    return best;
  };

  std::vector<int> sequence;
  std::vector<double> switch_points;
  double prev_t = 0;
  int prev_leader = -1;
  for (double t : grid) {
    if (t < ts.tstar) continue;
    const int leader = leader_at(t);
    if (prev_leader < 0) {
      sequence.push_back(leader);
    } else if (leader != prev_leader) {
      // Refine the breakpoint by bisection on the virtual-surplus difference.
      double lo = prev_t, hi = t;
      for (int iter = 0; iter < 100; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double d = model.virtual_surplus(base, prev_leader, mid) -
                         model.virtual_surplus(base, leader, mid);
        if (d >= 0) lo = mid;
        else hi = mid;
      }
      switch_points.push_back(0.5 * (lo + hi));
      sequence.push_back(leader);
    }
    prev_leader = leader;
    prev_t = t;
  }
  if (sequence.empty()) {
    result.error = "no types above the cutoff on the grid";
    return result;
  }
  if (sequence.front() != comp) {
    result.error = "the allocation at the cutoff is not the base complement";
    return result;
  }

  const double p_root = 0.5 * model.U(base, comp, ts.tstar);
  result.base_menu.items.emplace_back(base, p_root);
  result.upgrade_menu.items.emplace_back(comp, p_root);
  for (size_t k = 0; k + 1 < sequence.size(); ++k) {
    const double tau = switch_points[k];
    const double prev_price = result.upgrade_menu.items.back().second;
    const double step =
        model.U(base, sequence[k + 1], tau) - model.U(base, sequence[k], tau);
    result.upgrade_menu.items.emplace_back(sequence[k + 1], prev_price + step);
  }
  result.breakpoints = switch_points;

  // Structure tag from inclusion relations among the upgrade bundles.
  if (result.upgrade_menu.items.size() == 1) {
    result.structure = MenuStructure::singleton;
  } else {
    bool chain = true;
    for (size_t a = 0; a + 1 < result.upgrade_menu.items.size(); ++a) {
      const int x = result.upgrade_menu.items[a].first;
      const int y = result.upgrade_menu.items[a + 1].first;
      if ((x & y) != x) chain = false;  // successors must contain predecessors
    }
    result.structure = chain ? MenuStructure::nested : MenuStructure::tree;
  }
  result.ok = true;
  return result;
}

}  // namespace comag
