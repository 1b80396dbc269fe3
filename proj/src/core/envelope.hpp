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

#ifndef COMAG_CORE_ENVELOPE_HPP_
#define COMAG_CORE_ENVELOPE_HPP_

#include <string>
#include <vector>

namespace comag {

// A finite family of C1 members sampled on a common grid, with derivatives
// either supplied analytically or filled by central differences.
struct SampledFamily {
  std::vector<double> grid;
  std::vector<std::vector<double>> values;       // [member][grid]
  std::vector<std::vector<double>> derivatives;  // same shape; may start empty

  void fill_derivatives_by_differences();
};

struct Kink {
  double location = 0;
  double left_slope = 0;
  double right_slope = 0;
  bool upward = false;
  int outgoing_member = -1;
  int incoming_member = -1;
};

struct EnvelopeAudit {
  std::vector<double> envelope;            // pointwise max per grid point
  std::vector<std::vector<int>> active;    // active member indices per grid point
  std::vector<Kink> kinks;
  double lipschitz_estimate = 0;           // max adjacent difference quotient
  double tie_tolerance = 0;
};

// Pointwise max with active sets; kinks are located where the leading member
// changes, refined to the pairwise crossing inside the cell, with one-sided
// slopes taken from the outgoing/incoming members.
EnvelopeAudit upper_envelope(const SampledFamily& family, double tie_tolerance = 1e-12);

struct KinkAuditResult {
  bool pass = true;
  std::vector<Kink> downward;  // offending kinks
};

// Every kink of an upper envelope of C1 members must be upward; a downward
// kink flags corrupted input.
KinkAuditResult kink_audit(const EnvelopeAudit& audit, double tolerance = 1e-9);

struct IntegralCheckResult {
  std::vector<double> residual;  // per grid point
  double max_abs_residual = 0;
};

// Residual profile of V(t) - V(t0) - integral of the selector derivative.
// Quadrature is kink-aware: cells are split at estimated crossings and each
// piece integrates the active member's derivative.
IntegralCheckResult envelope_integral_check(const SampledFamily& family,
                                            const EnvelopeAudit& audit);

struct LipschitzAuditResult {
  double envelope_quotient = 0;  // max adjacent difference quotient of the envelope
  double member_bound = 0;       // max_j max_t |f_j'|
  bool pass = true;
};

LipschitzAuditResult lipschitz_audit(const SampledFamily& family, const EnvelopeAudit& audit,
                                     double tolerance = 1e-9);

}  // namespace comag

#endif  // COMAG_CORE_ENVELOPE_HPP_
