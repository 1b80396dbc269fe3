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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/bundling.hpp"
#include "test_util.hpp"

using namespace comag;
using comag_test::read_fixture;

namespace {

// Bundle bitmasks over two goods.
constexpr int kNone = 0, kOne = 1, kTwo = 2, kBoth = 3;

BundlingModel union_model() {
  return load_bundling_model(read_fixture("bundling_uniform12_union.json"));
}
BundlingModel umi_model() {
  return load_bundling_model(read_fixture("bundling_uniform12_umi.json"));
}
BundlingModel premium_model() {
  return load_bundling_model(read_fixture("bundling_premium_upgrades.json"));
}

}  // namespace

TEST_CASE("union preset on uniform [1,2]: the cutoff type is 4/3") {
  BundlingModel m = union_model();
  TstarResult ts = find_tstar(m, TstarVariant{true, 0});
  REQUIRE(ts.ok);
  CHECK(ts.monotone);
  CHECK(std::fabs(ts.tstar - 4.0 / 3.0) <= 1e-9);
  CHECK(std::fabs(ts.residual) <= 1e-9);
  // Both sides evaluate to t*/2 * g(full) = 4/3.
  CHECK(ts.lhs == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("base-variant cutoff coincides under the union preset") {
  BundlingModel m = union_model();
  TstarResult base = find_tstar(m, TstarVariant{false, kOne});
  REQUIRE(base.ok);
  CHECK(std::fabs(base.tstar - 4.0 / 3.0) <= 1e-9);
}

TEST_CASE("complement preset gives the same cutoff (max value coincides)") {
  BundlingModel m = umi_model();
  TstarResult ts = find_tstar(m, TstarVariant{true, 0});
  REQUIRE(ts.ok);
  CHECK(std::fabs(ts.tstar - 4.0 / 3.0) <= 1e-9);
}

TEST_CASE("boundary cutoff at the bottom type") {
  BundlingModel m = union_model();
  m.t_lo = 3;
  m.t_hi = 4;  // half the bottom value already exceeds the hazard term
  TstarResult ts = find_tstar(m, TstarVariant{true, 0});
  REQUIRE(ts.ok);
  CHECK(ts.tstar == 3.0);
}

TEST_CASE("jointly optimal pairs: union preset keeps every full-cover pair") {
  BundlingModel m = union_model();
  JointlyOptimalPairs jop = jointly_optimal_pairs(m);
  CHECK(jop.pairs.size() == 9);  // ordered pairs with b1 | b2 = {1,2}
  for (const auto& [b1, b2] : jop.pairs) CHECK((b1 | b2) == kBoth);
}

TEST_CASE("jointly optimal pairs: complement preset keeps exactly the partitions") {
  BundlingModel m = umi_model();
  JointlyOptimalPairs jop = jointly_optimal_pairs(m);
  REQUIRE(jop.pairs.size() == 4);
  std::vector<std::pair<int, int>> expect{{kNone, kBoth}, {kOne, kTwo}, {kTwo, kOne},
                                          {kBoth, kNone}};
  std::vector<std::pair<int, int>> got = jop.pairs;
  std::sort(got.begin(), got.end());
  CHECK(got == expect);
}

TEST_CASE("one-good union model: three pairs cover the single good") {
  BundlingModel m = union_model();
  m.goods = 1;
  m.g = {0, 1};
  JointlyOptimalPairs jop = jointly_optimal_pairs(m);
  std::vector<std::pair<int, int>> got = jop.pairs;
  std::sort(got.begin(), got.end());
  CHECK(got == std::vector<std::pair<int, int>>{{0, 1}, {1, 0}, {1, 1}});
}

TEST_CASE("market splitting: constructed menus pass and price at the common markup") {
  BundlingModel m = union_model();
  auto [menu1, menu2] = build_market_splitting(m, {kBoth}, {kOne, kTwo, kBoth});
  MarketSplitReport report = check_market_splitting(m, menu1, menu2);
  CHECK(report.pass);
  // price = (1/2) t* g(full) = (2/3) g(full) = 4/3.
  CHECK(report.expected_price == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  for (const auto& [b, p] : menu1.items) CHECK(p == doctest::Approx(report.expected_price));
  for (const auto& [b, p] : menu2.items) CHECK(p == doctest::Approx(report.expected_price));

  // Participation audit: above the cutoff weakly in, below strictly out.
  ParticipationAudit audit = market_split_participation_audit(m, menu1, menu2);
  CHECK(audit.pass);
}

TEST_CASE("market splitting: a perturbed price fails the price condition") {
  BundlingModel m = union_model();
  auto [menu1, menu2] = build_market_splitting(m, {kBoth}, {kOne, kTwo, kBoth});
  menu2.items[1].second += 1e-3;
  MarketSplitReport report = check_market_splitting(m, menu1, menu2);
  CHECK_FALSE(report.pass);
  CHECK(report.violation.find("price") != std::string::npos);
}

TEST_CASE("market splitting under the complement preset: partitions pass, overlap fails") {
  BundlingModel m = umi_model();
  auto [ok1, ok2] = build_market_splitting(m, {kOne, kTwo}, {kTwo, kOne});
  CHECK(check_market_splitting(m, ok1, ok2).pass);

  // {1,2} on firm 1 needs the empty bundle on firm 2, which is missing.
  auto [bad1, bad2] = build_market_splitting(m, {kOne, kBoth}, {kTwo, kOne});
  MarketSplitReport report = check_market_splitting(m, bad1, bad2);
  CHECK_FALSE(report.pass);
  CHECK(report.violation.find("bundle 3") != std::string::npos);
}

TEST_CASE("duplicate bundles in a menu are rejected") {
  BundlingModel m = union_model();
  PricedMenu dup;
  dup.items = {{kOne, 1.0}, {kOne, 2.0}};
  CHECK_THROWS_AS(check_market_splitting(m, dup, dup), std::invalid_argument);
}

TEST_CASE("monotone-differences check passes for the union preset") {
  BundlingModel m = union_model();
  for (int base = 0; base < m.num_bundles(); ++base) {
    MdStarReport report = check_md_star(m, base);
    CHECK(report.pass);
    CHECK(report.scope.find("deterministic-pair") != std::string::npos);
  }
}

TEST_CASE("monotone-differences check flags a crafted reversal") {
  BundlingModel m;
  m.goods = 1;
  m.preset = BundlingModel::Preset::union_with_premium;
  m.g = {0, 1};
  // Second-argument premium makes the pairwise difference quadratic with an
  // interior extremum: the gap changes direction inside [1, 2].
  m.premium_quad = {1, 0};
  m.premium_lin = {0, 0};
  m.t_lo = 1;
  m.t_hi = 2;
  MdStarReport report = check_md_star(m, 0);
  CHECK_FALSE(report.pass);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.worst_reversal > 0);
}

TEST_CASE("vacuous pass with a single bundle") {
  BundlingModel m = union_model();
  m.goods = 0;
  m.g = {0};
  CHECK(check_md_star(m, 0).pass);
}

TEST_CASE("complement preset degenerates to twin take-it-or-leave-it contracts") {
  BundlingModel m = umi_model();
  for (int base = 0; base < m.num_bundles(); ++base) {
    UpgradeMenuResult res = build_base_plus_upgrades(m, base);
    REQUIRE(res.ok);
    CHECK(res.structure == MenuStructure::singleton);
    REQUIRE(res.upgrade_menu.items.size() == 1);
    CHECK(res.upgrade_menu.items[0].first == (m.full_bundle() & ~base));
    CHECK(res.base_menu.items[0].second ==
          doctest::Approx(res.upgrade_menu.items[0].second).epsilon(1e-12));
  }
}

TEST_CASE("one-good union model: the upgrade menu is the degenerate singleton") {
  BundlingModel m = union_model();
  m.goods = 1;
  m.g = {0, 1};
  UpgradeMenuResult res = build_base_plus_upgrades(m, 1);
  REQUIRE(res.ok);
  CHECK(res.structure == MenuStructure::singleton);
  CHECK(res.upgrade_menu.items[0].first == 0);  // the complement of {1}
}

TEST_CASE("premium preset: a genuine two-item nested upgrade menu") {
  BundlingModel m = premium_model();
  UpgradeMenuResult res = build_base_plus_upgrades(m, kOne);
  REQUIRE(res.ok);
  CHECK(res.tstar == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  REQUIRE(res.upgrade_menu.items.size() == 2);
  CHECK(res.structure == MenuStructure::nested);
  CHECK(res.upgrade_menu.items[0].first == kTwo);   // root: the complement
  CHECK(res.upgrade_menu.items[1].first == kBoth);  // premium superset
  REQUIRE(res.breakpoints.size() == 1);
  // The switch point solves (3/2) tau^2 - 3 tau + 1 = 0 inside (t*, 2).
  CHECK(res.breakpoints[0] == doctest::Approx(1.0 + std::sqrt(3.0) / 3.0).epsilon(1e-6));
  // Root price is half the baseline surplus at the cutoff.
  CHECK(res.base_menu.items[0].second == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  CHECK(res.upgrade_menu.items[1].second > res.upgrade_menu.items[0].second);
}

TEST_CASE("upgrade-menu self-selection audit on the grid") {
  BundlingModel m = premium_model();
  UpgradeMenuResult res = build_base_plus_upgrades(m, kOne);
  REQUIRE(res.ok);
  const int base = res.base_menu.items[0].first;
  for (double t : m.make_grid(2001)) {
    if (t < res.tstar) continue;
    // The type's intended item from the breakpoint schedule.
    int intended = res.upgrade_menu.items[0].first;
    for (size_t k = 0; k < res.breakpoints.size(); ++k)
      if (t >= res.breakpoints[k]) intended = res.upgrade_menu.items[k + 1].first;
    double intended_surplus = 0, best = -1e300;
    for (const auto& [b, p] : res.upgrade_menu.items) {
      const double surplus = m.U(base, b, t) - p;
      if (b == intended) intended_surplus = surplus;
      best = std::max(best, surplus);
    }
    CHECK(intended_surplus >= best - 1e-9);
  }
}

TEST_CASE("root mismatch is reported when the cutoff allocation is not the complement") {
  BundlingModel m = premium_model();
  // Amplify the premium so the full bundle dominates already at the cutoff.
  m.premium_quad[kBoth] = 10;
  m.premium_lin[kBoth] = 0;
  UpgradeMenuResult res = build_base_plus_upgrades(m, kOne);
  CHECK_FALSE(res.ok);
  CHECK(res.error.find("complement") != std::string::npos);
}

TEST_CASE("tabulated valuations reproduce the union preset numerics") {
  BundlingModel u = union_model();
  BundlingModel m;
  m.goods = 2;
  m.preset = BundlingModel::Preset::tabulated;
  m.t_lo = 1;
  m.t_hi = 2;
  m.grid_n = u.grid_n;
  const int n = 2001;
  m.tab_grid.resize(n);
  m.tab_values.assign(16, std::vector<double>(n));
  for (int k = 0; k < n; ++k) {
    m.tab_grid[k] = 1 + static_cast<double>(k) / (n - 1);
    for (int b1 = 0; b1 < 4; ++b1)
      for (int b2 = 0; b2 < 4; ++b2)
        m.tab_values[b1 * 4 + b2][k] = u.U(b1, b2, m.tab_grid[k]);
  }
  TstarResult ts = find_tstar(m, TstarVariant{true, 0});
  REQUIRE(ts.ok);
  CHECK(std::fabs(ts.tstar - 4.0 / 3.0) <= 1e-6);
}

TEST_CASE("model loader validates the g table") {
  CHECK_THROWS_AS(load_bundling_model(R"({
    "goods": 2,
    "valuation": {"preset": "union", "g": [0, 1, 1, 1]},
    "distribution": {"preset": "uniform", "lo": 1, "hi": 2}
  })"),
                  std::invalid_argument);
}
