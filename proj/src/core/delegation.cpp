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

#include "core/delegation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "core/assembly.hpp"
#include "core/game.hpp"
#include "core/screening.hpp"

namespace comag {

using nlohmann::json;

double ScalarFn::operator()(double t) const {
  switch (kind) {
    case Kind::constant:
      return value;
    case Kind::linear:
      return intercept + slope * t;
    case Kind::piecewise_constant: {
      size_t x = 0;
      while (x < cuts.size() && t >= cuts[x]) ++x;
      return levels[x];
    }
    case Kind::piecewise_linear: {
      size_t x = 0;
      while (x < cuts.size() && t >= cuts[x]) ++x;
      return intercepts[x] + slopes[x] * t;
    }
    case Kind::sampled: {
      if (t <= sample_t.front()) return sample_v.front();
      if (t >= sample_t.back()) return sample_v.back();
      auto it = std::upper_bound(sample_t.begin(), sample_t.end(), t);
      size_t k = static_cast<size_t>(it - sample_t.begin());
      const double a = (t - sample_t[k - 1]) / (sample_t[k] - sample_t[k - 1]);
      return sample_v[k - 1] + a * (sample_v[k] - sample_v[k - 1]);
    }
  }
  return 0;
}

namespace {

ScalarFn parse_scalar_fn(const json& j) {
  ScalarFn fn;
  if (j.contains("sampled")) {
    fn.kind = ScalarFn::Kind::sampled;
    fn.sample_t = j["sampled"].at("t").get<std::vector<double>>();
    fn.sample_v = j["sampled"].at("v").get<std::vector<double>>();
    if (fn.sample_t.size() != fn.sample_v.size() || fn.sample_t.size() < 2)
      throw std::invalid_argument("sampled function needs aligned t/v arrays");
    return fn;
  }
  const std::string preset = j.at("preset").get<std::string>();
  if (preset == "constant") {
    fn.kind = ScalarFn::Kind::constant;
    fn.value = j.at("value").get<double>();
  } else if (preset == "linear") {
    fn.kind = ScalarFn::Kind::linear;
    fn.intercept = j.value("intercept", 0.0);
    fn.slope = j.value("slope", 0.0);
  } else if (preset == "piecewise_constant") {
    fn.kind = ScalarFn::Kind::piecewise_constant;
    fn.cuts = j.at("cuts").get<std::vector<double>>();
    fn.levels = j.at("levels").get<std::vector<double>>();
    if (fn.levels.size() != fn.cuts.size() + 1)
      throw std::invalid_argument("piecewise_constant needs one more level than cuts");
  } else if (preset == "piecewise_linear") {
    fn.kind = ScalarFn::Kind::piecewise_linear;
    fn.cuts = j.at("cuts").get<std::vector<double>>();
    fn.intercepts = j.at("intercepts").get<std::vector<double>>();
    fn.slopes = j.at("slopes").get<std::vector<double>>();
    if (fn.intercepts.size() != fn.cuts.size() + 1 || fn.slopes.size() != fn.cuts.size() + 1)
      throw std::invalid_argument("piecewise_linear needs one more segment than cuts");
  } else {
    throw std::invalid_argument("unknown scalar preset '" + preset + "'");
  }
  return fn;
}

}  // namespace

DelegationModel load_delegation_model(const std::string& json_text) {
  json doc = json::parse(json_text);
  DelegationModel m;
  m.t_lo = doc.at("types").at("lo").get<double>();
  m.t_hi = doc.at("types").at("hi").get<double>();
  if (!(m.t_lo < m.t_hi)) throw std::invalid_argument("type interval must be nondegenerate");

  const auto& dist = doc.at("types").at("density");
  if (dist.contains("preset") && dist["preset"] == "uniform") {
    const double span = m.t_hi - m.t_lo;
    m.density.kind = ScalarFn::Kind::constant;
    m.density.value = 1.0 / span;
    m.cdf.kind = ScalarFn::Kind::linear;
    m.cdf.intercept = -m.t_lo / span;
    m.cdf.slope = 1.0 / span;
    m.analytic_distribution = true;
  } else if (dist.contains("sampled")) {
    m.density.kind = ScalarFn::Kind::sampled;
    m.density.sample_t = dist["sampled"].at("t").get<std::vector<double>>();
    m.density.sample_v = dist["sampled"].at("f").get<std::vector<double>>();
    m.cdf.kind = ScalarFn::Kind::sampled;
    m.cdf.sample_t = m.density.sample_t;
    m.cdf.sample_v = dist["sampled"].at("F").get<std::vector<double>>();
    m.analytic_distribution = false;
    const double tol = 1e-6;
    if (std::fabs(m.cdf(m.t_lo)) > tol || std::fabs(m.cdf(m.t_hi) - 1.0) > tol)
      throw std::invalid_argument("sampled cdf must run from 0 to 1 over the type interval");
  } else {
    throw std::invalid_argument("density must be the uniform preset or sampled arrays");
  }

  const auto& ps = doc.at("principals");
  if (ps.size() != 2) throw std::invalid_argument("exactly two principals are supported");
  for (int i = 0; i < 2; ++i) {
    m.principals[i].weight = parse_scalar_fn(ps[i].at("weight"));
    m.principals[i].ideal = parse_scalar_fn(ps[i].at("ideal"));
    m.principals[i].out_lo = ps[i].at("outcomes").at("lo").get<double>();
    m.principals[i].out_hi = ps[i].at("outcomes").at("hi").get<double>();
  }
  m.grid_n = doc.value("grid", 1001);
  if (m.grid_n < 3) throw std::invalid_argument("grid must have at least 3 points");
  return m;
}

RegimeSpec load_regime_spec(const std::string& json_text) {
  json doc = json::parse(json_text);
  RegimeSpec spec;
  const std::string scenario = doc.at("scenario").get<std::string>();
  if (scenario == "full_delegation") spec.scenario = RegimeSpec::Scenario::full_delegation;
  else if (scenario == "no_compromise") spec.scenario = RegimeSpec::Scenario::no_compromise;
  else if (scenario == "both_no_compromise")
    spec.scenario = RegimeSpec::Scenario::both_no_compromise;
  else if (scenario == "piecewise") spec.scenario = RegimeSpec::Scenario::piecewise;
  else throw std::invalid_argument("unknown scenario '" + scenario + "'");

  spec.fine_principal = doc.value("fine_principal", 2) - 1;
  if (spec.fine_principal != 0 && spec.fine_principal != 1)
    throw std::invalid_argument("fine_principal must be 1 or 2");
  if (spec.scenario == RegimeSpec::Scenario::piecewise) {
    spec.fine_principal = 1;  // principal 1 coarse, principal 2 fine
    spec.cutpoints = doc.value("cutpoints", std::vector<double>{});
    spec.levels = doc.at("levels").get<std::vector<double>>();
    if (spec.levels.size() != spec.cutpoints.size() + 1)
      throw std::invalid_argument("piecewise needs one more level than cutpoints");
  }
  return spec;
}

namespace {

std::vector<double> make_grid(const DelegationModel& model, int n) {
  std::vector<double> grid(n);
  for (int k = 0; k < n; ++k)
    grid[k] = model.t_lo + (model.t_hi - model.t_lo) * k / (n - 1);
  return grid;
}

// Right-continuous segment index: t belongs to [cut[x-1], cut[x]).
int segment_of(const std::vector<double>& cuts, double t) {
  int x = 0;
  while (x < static_cast<int>(cuts.size()) && t >= cuts[x]) ++x;
  return x;
}

// The shared condition engine for full delegation (K = 0) and the piecewise
// regime: identical checks so the two produce identical reports.
ConditionReport piecewise_conditions(const DelegationModel& model, int coarse, int fine,
                                     const std::vector<double>& cuts,
                                     const std::vector<double>& levels, int grid_n) {
  ConditionReport report;
  report.tolerance = model.tolerance();
  const double tol = report.tolerance;
  report.grid = make_grid(model, grid_n);

  const auto& cp = model.principals[coarse];
  const auto& fp = model.principals[fine];

  for (double lv : levels)
    if (lv < cp.out_lo - tol || lv > cp.out_hi + tol) {
      report.error = "level outside the coarse principal's outcome interval";
      return report;
    }
  for (size_t x = 0; x + 1 < cuts.size(); ++x)
    if (!(cuts[x] < cuts[x + 1])) {
      report.error = "cutpoints must be strictly increasing";
      return report;
    }
  if (!cuts.empty() && (cuts.front() <= model.t_lo || cuts.back() >= model.t_hi)) {
    report.error = "cutpoints must be interior to the type interval";
    return report;
  }

  // kappa = min_t r_fine(t) / 2, taken over the grid.
  double min_weight = fp.weight(report.grid[0]);
  for (double t : report.grid) min_weight = std::min(min_weight, fp.weight(t));
  if (min_weight <= 0) {
    report.error = "weight function must be strictly positive";
    return report;
  }
  const double kappa = min_weight / 2;

  auto multiplier_at = [&](double t, double level) {
    return kappa * model.cdf(t) +
           2 * fp.weight(t) * (t - level - fp.ideal(t)) * model.density(t);
  };

  // Segment membership per grid point (right-continuous at cutpoints).
  std::vector<int> seg(report.grid.size());
  std::vector<int> seg_count(levels.size(), 0);
  for (size_t k = 0; k < report.grid.size(); ++k) {
    seg[k] = segment_of(cuts, report.grid[k]);
    ++seg_count[seg[k]];
  }
  for (size_t x = 0; x < levels.size(); ++x)
    if (seg_count[x] < 3) {
      report.error = "grid too coarse: fewer than 3 points in a segment";
      return report;
    }

  report.multiplier.resize(report.grid.size());
  for (size_t k = 0; k < report.grid.size(); ++k)
    report.multiplier[k] = multiplier_at(report.grid[k], levels[seg[k]]);
  report.multiplier.back() = kappa * model.cdf(model.t_hi);

  // Condition: the coarse ideal point is constant at the level on each
  // segment (for K = 0 this is exactly the type-independent peak).
  {
    double worst = 0;
    for (size_t k = 0; k < report.grid.size(); ++k)
      worst = std::max(worst, std::fabs(cp.ideal(report.grid[k]) - levels[seg[k]]));
    report.conditions.push_back(
        {"coarse ideal matches the segment level", worst <= tol, -worst, ""});
  }

  // Condition: t - level stays inside the fine principal's outcome interval.
  {
    double worst = 0;
    for (size_t k = 0; k < report.grid.size(); ++k) {
      const double o = report.grid[k] - levels[seg[k]];
      worst = std::max(worst, std::max(fp.out_lo - o, o - fp.out_hi));
    }
    report.conditions.push_back(
        {"fine outcome interval covers t - level", worst <= tol, -worst, ""});
  }

  // Condition (per segment): the multiplier expression is increasing.
  {
    double margin = 0;
    bool first = true;
    for (size_t k = 0; k + 1 < report.grid.size(); ++k) {
      if (seg[k] != seg[k + 1]) continue;
      const double inc = multiplier_at(report.grid[k + 1], levels[seg[k]]) -
                         multiplier_at(report.grid[k], levels[seg[k]]);
      if (first || inc < margin) {
        margin = inc;
        first = false;
      }
    }
    report.monotonicity_margin = margin;
    report.conditions.push_back(
        {"multiplier increasing within each segment", margin >= -tol, margin, ""});
  }

  // Condition (per cutpoint): no downward jump. The left limit uses linear
  // extrapolation from the last two grid samples strictly left of the cut.
  for (size_t x = 0; x < cuts.size(); ++x) {
    const double cut = cuts[x];
    double t1 = 0, t2 = 0;
    int found = 0;
    for (size_t k = report.grid.size(); k-- > 0;) {
      if (report.grid[k] < cut) {
        if (found == 0) t2 = report.grid[k];
        else if (found == 1) {
          t1 = report.grid[k];
          break;
        }
        ++found;
        if (found == 2) break;
      }
    }
    const double l1 = multiplier_at(t1, levels[x]);
    const double l2 = multiplier_at(t2, levels[x]);
    const double left_limit = (t2 > t1) ? l2 + (l2 - l1) * (cut - t2) / (t2 - t1) : l2;
    const double jump = multiplier_at(cut, levels[x + 1]) - left_limit;
    report.jump_margins.push_back(jump);
    report.conditions.push_back({"multiplier jump at cutpoint " + std::to_string(x + 1),
                                 jump >= -tol, jump, ""});
  }

  // Boundary conditions.
  {
    const double lo_res = model.t_lo - levels.front() - fp.ideal(model.t_lo);
    const double hi_res = model.t_hi - levels.back() - fp.ideal(model.t_hi);
    report.boundary_residuals = {lo_res, hi_res};
    report.conditions.push_back(
        {"lower boundary equality", std::fabs(lo_res) <= tol, -std::fabs(lo_res), ""});
    report.conditions.push_back({"upper boundary inequality", hi_res <= tol, -hi_res, ""});
  }

  report.pass = std::all_of(report.conditions.begin(), report.conditions.end(),
                            [](const ConditionStatus& c) { return c.pass; });
  return report;
}

}  // namespace

ConditionReport check_regime(const DelegationModel& model, const RegimeSpec& spec, int grid_n) {
  if (grid_n <= 0) grid_n = model.grid_n;
  if (grid_n < 3) {
    ConditionReport report;
    report.error = "grid too coarse: fewer than 3 points";
    return report;
  }
  const int fine = spec.fine_principal;
  const int coarse = 1 - fine;

  switch (spec.scenario) {
    case RegimeSpec::Scenario::full_delegation: {
      const double level = model.principals[coarse].ideal(model.t_lo);
      return piecewise_conditions(model, coarse, fine, {}, {level}, grid_n);
    }
    case RegimeSpec::Scenario::piecewise:
      return piecewise_conditions(model, 0, 1, spec.cutpoints, spec.levels, grid_n);
    case RegimeSpec::Scenario::no_compromise: {
      ConditionReport report;
      report.tolerance = model.tolerance();
      report.grid = make_grid(model, grid_n);
      const auto& cp = model.principals[coarse];
      const auto& fp = model.principals[fine];
      const double level = cp.ideal(model.t_lo);
      {
        double worst = 0;
        for (double t : report.grid) worst = std::max(worst, std::fabs(cp.ideal(t) - level));
        report.conditions.push_back(
            {"coarse ideal is type-independent", worst <= report.tolerance, -worst, ""});
      }
      // Integral identity, cumulative trapezoid of the fine ideal.
      const double t0 = model.t_lo;
      const double base = fp.ideal(t0);
      double integral = 0, worst = 0;
      for (size_t k = 0; k < report.grid.size(); ++k) {
        const double t = report.grid[k];
        if (k > 0) {
          const double h = report.grid[k] - report.grid[k - 1];
          integral += 0.5 * (fp.ideal(report.grid[k - 1]) + fp.ideal(t)) * h;
        }
        const double lhs = (t - level) * fp.ideal(t) - fp.ideal(t) * fp.ideal(t) / 2 +
                           base * base / 2 - (t0 - level) * base;
        worst = std::max(worst, std::fabs(lhs - integral));
      }
      report.integral_residual = worst;
      report.conditions.push_back(
          {"incentive integral identity", worst <= report.tolerance, -worst, ""});
      report.pass = std::all_of(report.conditions.begin(), report.conditions.end(),
                                [](const ConditionStatus& c) { return c.pass; });
      return report;
    }
    case RegimeSpec::Scenario::both_no_compromise: {
      ConditionReport report;
      report.tolerance = model.tolerance();
      report.grid = make_grid(model, grid_n);
      double worst = 0;
      for (double t : report.grid)
        worst = std::max(
            worst, std::fabs(model.principals[0].ideal(t) + model.principals[1].ideal(t) - t));
      report.conditions.push_back(
          {"ideal points partition the bliss point", worst <= report.tolerance, -worst, ""});
      report.pass = report.conditions.front().pass;
      return report;
    }
  }
  ConditionReport report;
  report.error = "unknown scenario";
  return report;
}

DelegationProfile build_delegation_profile(const DelegationModel& model, const RegimeSpec& spec,
                                           const ConditionReport& report) {
  if (!report.pass)
    throw std::invalid_argument("build requires a passing condition report");

  DelegationProfile profile;
  const int fine = spec.fine_principal;
  const int coarse = 1 - fine;
  profile.fine_principal = fine;
  profile.coarse_principal = coarse;
  profile.grid = report.grid.empty() ? std::vector<double>{} : report.grid;
  if (profile.grid.empty()) {
    profile.grid.resize(model.grid_n);
    for (int k = 0; k < model.grid_n; ++k)
      profile.grid[k] = model.t_lo + (model.t_hi - model.t_lo) * k / (model.grid_n - 1);
  }

  auto fill_alloc = [&](auto&& coarse_of_t, auto&& fine_of_t) {
    for (double t : profile.grid) {
      const double oc = coarse_of_t(t);
      const double of = fine_of_t(t);
      profile.alloc_coarse.push_back(oc);
      profile.alloc_fine.push_back(of);
      profile.bliss_residual.push_back(t - oc - of);
    }
  };

  switch (spec.scenario) {
    case RegimeSpec::Scenario::full_delegation: {
      const double level = model.principals[coarse].ideal(model.t_lo);
      profile.finite_menu = {level};
      profile.interval_menu = {{model.t_lo, model.t_hi, level}};
      fill_alloc([&](double) { return level; }, [&](double t) { return t - level; });
      profile.description = "one fixed coarse outcome; full discretion s - level for the fine "
                            "principal";
      break;
    }
    case RegimeSpec::Scenario::piecewise: {
      profile.finite_menu = spec.levels;
      std::vector<double> edges = spec.cutpoints;
      edges.insert(edges.begin(), model.t_lo);
      edges.push_back(model.t_hi);
      for (size_t x = 0; x + 1 < edges.size(); ++x)
        profile.interval_menu.push_back({edges[x], edges[x + 1], spec.levels[x]});
      auto level_at = [&](double t) { return spec.levels[segment_of(spec.cutpoints, t)]; };
      fill_alloc(level_at, [&](double t) { return t - level_at(t); });
      profile.description = "finite menu of regimes; per-segment full discretion s - level";
      break;
    }
    case RegimeSpec::Scenario::no_compromise: {
      const double level = model.principals[coarse].ideal(model.t_lo);
      profile.finite_menu = {level};
      fill_alloc([&](double) { return level; },
                 [&](double t) { return model.principals[fine].ideal(t); });
      profile.description = "one fixed coarse outcome; the fine principal implements her ideal";
      break;
    }
    case RegimeSpec::Scenario::both_no_compromise: {
      fill_alloc([&](double t) { return model.principals[coarse].ideal(t); },
                 [&](double t) { return model.principals[fine].ideal(t); });
      profile.description = "both principals implement their ideals";
      break;
    }
  }

  // Envelope slack along the built allocation: with x(t) = o_1 + o_2, the
  // slack is t x - x^2/2 evaluated against its own integral.
  {
    double integral = 0;
    for (size_t k = 0; k < profile.grid.size(); ++k) {
      const double t = profile.grid[k];
      const double x = profile.alloc_coarse[k] + profile.alloc_fine[k];
      const double x0 = profile.alloc_coarse[0] + profile.alloc_fine[0];
      if (k > 0) {
        const double h = profile.grid[k] - profile.grid[k - 1];
        const double prev = profile.alloc_coarse[k - 1] + profile.alloc_fine[k - 1];
        integral += 0.5 * (prev + x) * h;
      }
      const double psi = t * x - x * x / 2;
      const double psi0 = profile.grid[0] * x0 - x0 * x0 / 2;
      profile.envelope_slack.push_back(psi - psi0 - integral);
    }
  }
  return profile;
}

CrossValidation cross_validate_discretized(const DelegationModel& model, const RegimeSpec& spec,
                                           int n_types, int n_outcomes) {
  if (n_types < 5 || n_outcomes < 5)
    throw std::invalid_argument("discretization sizes must be at least 5");
  ConditionReport report = check_regime(model, spec);
  if (!report.pass) throw std::invalid_argument("spec must pass check_regime first");
  RegimeSpec local = spec;
  DelegationProfile closed = build_delegation_profile(model, local, report);

  CrossValidation xv;
  FiniteGame game;
  game.principals = {"1", "2"};
  game.type_labels.resize(n_types);
  game.type_prob.resize(n_types);
  std::vector<double> type_grid(n_types);
  Rational prob_sum = 0;
  for (int k = 0; k < n_types; ++k) {
    type_grid[k] = model.t_lo + (model.t_hi - model.t_lo) * k / (n_types - 1);
    game.type_labels[k] = "t" + std::to_string(k);
    Rational w(model.density(type_grid[k]));
    game.type_prob[k] = w;
    prob_sum += w;
  }
  for (auto& p : game.type_prob) p /= prob_sum;

  game.outcome_labels.resize(2);
  std::vector<std::vector<double>> outcome_grid(2);
  for (int i = 0; i < 2; ++i) {
    const auto& pr = model.principals[i];
    outcome_grid[i].resize(n_outcomes);
    for (int o = 0; o < n_outcomes; ++o) {
      outcome_grid[i][o] = pr.out_lo + (pr.out_hi - pr.out_lo) * o / (n_outcomes - 1);
      game.outcome_labels[i].push_back("o" + std::to_string(o));
    }
  }
  xv.outcome_step = (model.principals[1].out_hi - model.principals[1].out_lo) / (n_outcomes - 1);

  const int T = n_types;
  game.agent_table.assign(game.profile_count() * T, Rational());
  for (long long p = 0; p < game.profile_count(); ++p) {
    OutcomeProfile o = game.profile_at(p);
    for (int t = 0; t < T; ++t)
      game.agent_table[p * T + t] =
          Rational(model.agent_utility(outcome_grid[0][o[0]], outcome_grid[1][o[1]],
                                       type_grid[t]));
  }
  game.independent_payoffs = true;
  game.principal_table.resize(2);
  for (int i = 0; i < 2; ++i) {
    game.principal_table[i].assign(static_cast<long long>(n_outcomes) * T, Rational());
    for (int o = 0; o < n_outcomes; ++o)
      for (int t = 0; t < T; ++t)
        game.principal_table[i][static_cast<long long>(o) * T + t] =
            Rational(model.principal_utility(i, outcome_grid[i][o], type_grid[t]));
  }

  // Predicted mechanisms: snap the closed-form allocation to the grids.
  auto snap = [&](int i, double x) {
    int best = 0;
    for (int o = 1; o < n_outcomes; ++o)
      if (std::fabs(outcome_grid[i][o] - x) < std::fabs(outcome_grid[i][best] - x)) best = o;
    return best;
  };
  // The closed-form allocation evaluated exactly at t.
  auto closed_alloc = [&](int i, double t) {
    const bool is_coarse = (i == closed.coarse_principal);
    switch (spec.scenario) {
      case RegimeSpec::Scenario::full_delegation: {
        const double level = model.principals[closed.coarse_principal].ideal(model.t_lo);
        return is_coarse ? level : t - level;
      }
      case RegimeSpec::Scenario::piecewise: {
        const double level = spec.levels[segment_of(spec.cutpoints, t)];
        return is_coarse ? level : t - level;
      }
      case RegimeSpec::Scenario::no_compromise:
        return is_coarse ? model.principals[closed.coarse_principal].ideal(model.t_lo)
                         : model.principals[closed.fine_principal].ideal(t);
      case RegimeSpec::Scenario::both_no_compromise:
        return model.principals[i].ideal(t);
    }
    return 0.0;
  };

  std::vector<DirectMechanism> predicted(2);
  for (int i = 0; i < 2; ++i) {
    predicted[i].principal = i;
    predicted[i].assignment.resize(T);
    for (int t = 0; t < T; ++t)
      predicted[i].assignment[t] = snap(i, closed_alloc(i, type_grid[t]));
  }
  MenuProfile menus = menus_of(predicted);

  // Mutual verification and the solver's own allocation.
  std::vector<DirectMechanism> solved(2);
  xv.mutual_profile_found = true;
  for (int i = 0; i < 2; ++i) {
    ScreeningProblem problem;
    problem.game = &game;
    problem.principal = i;
    problem.rival_menus = menus;
    ScreeningSolution sol = solve_screening(problem);
    bool found = false;
    for (const auto& mech : sol.mechanisms)
      if (mech.induced_menu() == menus[i]) {
        solved[i] = mech;
        found = true;
        break;
      }
    if (!found) {
      xv.mutual_profile_found = false;
      xv.note = "the grid optimum does not reproduce the predicted menu for principal " +
                game.principals[i];
      return xv;
    }
  }

  double sup = 0;
  for (int i = 0; i < 2; ++i)
    for (int t = 0; t < T; ++t)
      sup = std::max(sup, std::fabs(outcome_grid[i][solved[i].assignment[t]] -
                                    closed_alloc(i, type_grid[t])));
  xv.allocation_sup_distance = sup;

  CompatibilityReport upr = check_compatibility(game, solved, CompatibilityVariant::upr);
  xv.upr_pass = upr.pass;
  return xv;
}

}  // namespace comag
