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

#ifndef COMAG_CORE_DELEGATION_HPP_
#define COMAG_CORE_DELEGATION_HPP_

#include <optional>
#include <string>
#include <vector>

namespace comag {

// Scalar function of the type, preset-backed or grid-sampled.
struct ScalarFn {
  enum class Kind { constant, linear, piecewise_constant, piecewise_linear, sampled };
  Kind kind = Kind::constant;
  double value = 0;                 // constant
  double intercept = 0, slope = 0;  // linear: intercept + slope * t
  std::vector<double> cuts;         // piecewise kinds (right-continuous)
  std::vector<double> levels;       // piecewise_constant
  std::vector<double> intercepts, slopes;  // piecewise_linear, per segment
  std::vector<double> sample_t, sample_v;

  double operator()(double t) const;
  bool analytic() const { return kind != Kind::sampled; }
};

struct DelegationPrincipal {
  ScalarFn weight;  // r_i(t) > 0
  ScalarFn ideal;   // ideal point o_i*(t)
  double out_lo = 0, out_hi = 0;
};

// Quadratic-loss environment: the agent wants o_1 + o_2 = t, each principal
// wants her own outcome at the ideal point.
struct DelegationModel {
  double t_lo = 0, t_hi = 1;
  ScalarFn density;  // f, strictly positive
  ScalarFn cdf;      // F
  bool analytic_distribution = true;
  DelegationPrincipal principals[2];
  int grid_n = 1001;

  double agent_utility(double o1, double o2, double t) const {
    const double d = t - o1 - o2;
    return -d * d;
  }
  double principal_utility(int i, double o, double t) const {
    const double d = o - principals[i].ideal(t);
    return -principals[i].weight(t) * d * d;
  }
  double tolerance() const { return analytic_distribution ? 1e-9 : 1e-6; }
};

DelegationModel load_delegation_model(const std::string& json_text);

struct RegimeSpec {
  enum class Scenario { full_delegation, no_compromise, both_no_compromise, piecewise };
  Scenario scenario = Scenario::full_delegation;
  int fine_principal = 1;        // the principal granted discretion (0-based)
  std::vector<double> cutpoints; // piecewise: interior cutpoints, ascending
  std::vector<double> levels;    // piecewise: K+1 coarse levels
};

RegimeSpec load_regime_spec(const std::string& json_text);

struct ConditionStatus {
  std::string name;
  bool pass = false;
  double margin = 0;  // worst slack; >= -tolerance passes
  std::string note;
};

struct ConditionReport {
  bool pass = false;
  std::vector<ConditionStatus> conditions;
  std::vector<double> grid;
  std::vector<double> multiplier;      // assembled multiplier path on the grid
  double monotonicity_margin = 0;      // min adjacent multiplier increment
  std::vector<double> jump_margins;    // per interior cutpoint
  std::vector<double> boundary_residuals;
  double integral_residual = 0;        // no-compromise identity, max |residual|
  double tolerance = 0;
  std::string error;  // grid too coarse, level outside the outcome interval, ...
};

ConditionReport check_regime(const DelegationModel& model, const RegimeSpec& spec,
                             int grid_n = 0);

struct IntervalFamily {
  double t_lo = 0, t_hi = 0;  // types served by this segment
  double offset = 0;          // menu items are {s - offset : s in [t_lo, t_hi)}
};

struct DelegationProfile {
  std::vector<double> grid;
  std::vector<double> alloc_coarse, alloc_fine;  // allocation per grid type
  int coarse_principal = 0, fine_principal = 1;
  std::vector<double> finite_menu;            // coarse principal's levels
  std::vector<IntervalFamily> interval_menu;  // fine principal's segment menus
  std::vector<double> bliss_residual;         // t - o_1(t) - o_2(t)
  std::vector<double> envelope_slack;         // integral-form slack per grid point
  std::string description;
};

// Materializes the menu profile certified by check_regime. Throws when the
// report did not pass.
DelegationProfile build_delegation_profile(const DelegationModel& model, const RegimeSpec& spec,
                                           const ConditionReport& report);

struct CrossValidation {
  bool mutual_profile_found = false;
  bool upr_pass = false;
  double allocation_sup_distance = 0;
  double outcome_step = 0;
  std::string note;
};

// Samples the model into an exact finite game, reruns the screening layer
// against the predicted menus, and compares allocations.
CrossValidation cross_validate_discretized(const DelegationModel& model, const RegimeSpec& spec,
                                           int n_types, int n_outcomes);

}  // namespace comag

#endif  // COMAG_CORE_DELEGATION_HPP_
