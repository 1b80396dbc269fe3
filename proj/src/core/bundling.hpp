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

#ifndef COMAG_CORE_BUNDLING_HPP_
#define COMAG_CORE_BUNDLING_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace comag {

// Duopoly bundling under intrinsic common agency: bundles are bitmasks over
// the goods, firms price menus of bundles, and the consumer's gross valuation
// U((b1, b2), t) is strictly increasing in the type where required.
struct BundlingModel {
  enum class Preset { union_only, union_minus_intersection, union_with_premium, tabulated };
  int goods = 1;
  Preset preset = Preset::union_only;
  std::vector<double> g;  // per bundle, strictly increasing in set inclusion
  // union_with_premium: U = t g(b1|b2) + quad[b2] t^2/2 - lin[b2] t
  std::vector<double> premium_quad, premium_lin;
  std::vector<double> tab_grid;
  std::vector<std::vector<double>> tab_values;  // [pair index][grid], pair = b1 * B + b2
  double t_lo = 1, t_hi = 2;  // uniform type distribution
  double price_cap = 1e9;
  int grid_n = 1001;

  int num_bundles() const { return 1 << goods; }
  int full_bundle() const { return num_bundles() - 1; }
  double U(int b1, int b2, double t) const;
  double Ut(int b1, int b2, double t) const;
  double F(double t) const { return (t - t_lo) / (t_hi - t_lo); }
  double f(double) const { return 1.0 / (t_hi - t_lo); }
  double hazard_term(double t) const { return (1 - F(t)) / f(t); }  // -> 0 at the top type
  double virtual_surplus(int b1, int b2, double t) const {
    return U(b1, b2, t) - hazard_term(t) * Ut(b1, b2, t);
  }
  std::vector<double> make_grid(int n = 0) const;
};

BundlingModel load_bundling_model(const std::string& json_text);

// A finite priced menu; no bundle appears twice.
struct PricedMenu {
  std::vector<std::pair<int, double>> items;  // (bundle, price)
};

struct TstarResult {
  bool ok = false;
  double tstar = 0;
  double lhs = 0, rhs = 0;  // half max gross value vs max virtual surplus at t*
  double residual = 0;
  bool monotone = true;
  std::string error;  // no sign change, monotonicity violation
};

struct TstarVariant {
  bool market_split = true;
  int base = 0;  // used when market_split is false
};

// Cutoff type: bisection root of half-the-gross-value against the virtual
// surplus, per variant; left-endpoint root reported when the defining
// function already starts nonpositive.
TstarResult find_tstar(const BundlingModel& model, const TstarVariant& variant,
                       double residual_tol = 1e-9);

struct JointlyOptimalPairs {
  std::vector<std::pair<int, int>> pairs;  // ordered (b1, b2)
  bool empty_reported = false;
};

// Pairs maximizing both gross value and virtual surplus at every grid type.
JointlyOptimalPairs jointly_optimal_pairs(const BundlingModel& model,
                                          double tie_tolerance = 1e-9);

struct MarketSplitReport {
  bool pass = false;
  double tstar = 0;
  double expected_price = 0;
  std::string violation;  // first violation, empty on pass
};

// Cross-matching into the jointly optimal pairs plus the common-markup price
// condition.
MarketSplitReport check_market_splitting(const BundlingModel& model, const PricedMenu& menu1,
                                         const PricedMenu& menu2, double price_tol = 1e-9);

// Prices a proposed split at the common markup; the caller picks the bundle
// partition.
std::pair<PricedMenu, PricedMenu> build_market_splitting(const BundlingModel& model,
                                                         const std::vector<int>& bundles1,
                                                         const std::vector<int>& bundles2);

struct ParticipationAudit {
  bool pass = false;
  double worst_in_margin = 0;   // min over t >= t* of best surplus (should be >= -tol)
  double worst_out_margin = 0;  // max over t < t* of best surplus (should be < 0)
};

// Grid audit that every type above the cutoff weakly prefers participating
// and every type below strictly prefers quitting.
ParticipationAudit market_split_participation_audit(const BundlingModel& model,
                                                    const PricedMenu& menu1,
                                                    const PricedMenu& menu2, double tol = 1e-9);

enum class MenuStructure { singleton, nested, tree };

struct UpgradeMenuResult {
  bool ok = false;
  PricedMenu base_menu;     // the take-it-or-leave-it contract
  PricedMenu upgrade_menu;  // rooted at the base complement
  MenuStructure structure = MenuStructure::singleton;
  double tstar = 0;
  std::vector<double> breakpoints;
  std::string error;  // root mismatch, monotonicity failure, ...
};

// Pointwise argmax of the base-conditional virtual surplus above the cutoff,
// with indifference pricing at the breakpoints.
UpgradeMenuResult build_base_plus_upgrades(const BundlingModel& model, int base);

struct MdStarViolation {
  int b = 0, bprime = 0;
  double reversal = 0;
};

struct MdStarReport {
  bool pass = true;
  std::vector<MdStarViolation> violations;
  double worst_reversal = 0;
  // Deterministic-pair scope: the lottery version of the condition is not
  // implied by these pairwise checks.
  std::string scope = "necessary, deterministic-pair scope";
};

// Grid monotonicity (either direction) of all pairwise differences of the
// base-conditional virtual surplus.
MdStarReport check_md_star(const BundlingModel& model, int base, double tol = 1e-9);

}  // namespace comag

#endif  // COMAG_CORE_BUNDLING_HPP_
