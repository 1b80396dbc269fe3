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

#include "core/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace comag {

void SampledFamily::fill_derivatives_by_differences() {
  derivatives.assign(values.size(), {});
  const int N = static_cast<int>(grid.size());
  for (size_t j = 0; j < values.size(); ++j) {
    auto& d = derivatives[j];
    d.resize(N);
    const auto& f = values[j];
    for (int k = 0; k < N; ++k) {
      if (k == 0) d[k] = (f[1] - f[0]) / (grid[1] - grid[0]);
      else if (k == N - 1) d[k] = (f[N - 1] - f[N - 2]) / (grid[N - 1] - grid[N - 2]);
      else d[k] = (f[k + 1] - f[k - 1]) / (grid[k + 1] - grid[k - 1]);
    }
  }
}

namespace {

void validate(const SampledFamily& family) {
  if (family.grid.size() < 2) throw std::invalid_argument("grid needs at least 2 points");
  if (family.values.empty()) throw std::invalid_argument("family needs at least one member");
  for (const auto& v : family.values)
    if (v.size() != family.grid.size()) throw std::invalid_argument("grid mismatch");
  if (!family.derivatives.empty()) {
    if (family.derivatives.size() != family.values.size())
      throw std::invalid_argument("derivative arrays must align with value arrays");
    for (const auto& d : family.derivatives)
      if (d.size() != family.grid.size()) throw std::invalid_argument("grid mismatch");
  }
}

// Interpolated derivative of member j at x inside cell [k, k+1].
double member_derivative_at(const SampledFamily& family, int j, int k, double x) {
  const double x0 = family.grid[k], x1 = family.grid[k + 1];
  const double d0 = family.derivatives[j][k], d1 = family.derivatives[j][k + 1];
  if (x1 == x0) return d0;
  const double a = (x - x0) / (x1 - x0);
  return d0 + a * (d1 - d0);
}

// Crossing of members i and j inside cell [k, k+1], by linear interpolation
// of the value difference; clamped to the cell.
double crossing_point(const SampledFamily& family, int i, int j, int k) {
  const double x0 = family.grid[k], x1 = family.grid[k + 1];
  const double d0 = family.values[i][k] - family.values[j][k];
  const double d1 = family.values[i][k + 1] - family.values[j][k + 1];
  if (d0 == d1) return x0;
  double x = x0 + d0 * (x1 - x0) / (d0 - d1);
  return std::min(std::max(x, x0), x1);
}

}  // namespace

EnvelopeAudit upper_envelope(const SampledFamily& family, double tie_tolerance) {
  validate(family);
  SampledFamily local = family;
  if (local.derivatives.empty()) local.fill_derivatives_by_differences();

  const int N = static_cast<int>(local.grid.size());
  const int J = static_cast<int>(local.values.size());
  EnvelopeAudit audit;
  audit.tie_tolerance = tie_tolerance;
  audit.envelope.resize(N);
  audit.active.resize(N);

  for (int k = 0; k < N; ++k) {
    double best = local.values[0][k];
    for (int j = 1; j < J; ++j) best = std::max(best, local.values[j][k]);
    audit.envelope[k] = best;
    const double tol = tie_tolerance * std::max(1.0, std::fabs(best));
    for (int j = 0; j < J; ++j)
      if (best - local.values[j][k] <= tol) audit.active[k].push_back(j);
  }

  for (int k = 0; k + 1 < N; ++k) {
    const int out = audit.active[k].front();
    const int in = audit.active[k + 1].front();
    if (out == in) continue;
    Kink kink;
    kink.outgoing_member = out;
    kink.incoming_member = in;
    kink.location = crossing_point(local, out, in, k);
    kink.left_slope = member_derivative_at(local, out, k, kink.location);
    kink.right_slope = member_derivative_at(local, in, k, kink.location);
    kink.upward = kink.right_slope >= kink.left_slope;
    audit.kinks.push_back(kink);
  }

  for (int k = 0; k + 1 < N; ++k) {
    const double h = local.grid[k + 1] - local.grid[k];
    if (h == 0) continue;
    audit.lipschitz_estimate = std::max(
        audit.lipschitz_estimate, std::fabs(audit.envelope[k + 1] - audit.envelope[k]) / h);
  }
  return audit;
}

KinkAuditResult kink_audit(const EnvelopeAudit& audit, double tolerance) {
  KinkAuditResult result;
  for (const Kink& k : audit.kinks) {
    if (k.right_slope < k.left_slope - tolerance) {
      result.pass = false;
      result.downward.push_back(k);
    }
  }
  return result;
}

IntegralCheckResult envelope_integral_check(const SampledFamily& family,
                                            const EnvelopeAudit& audit) {
  validate(family);
  SampledFamily local = family;
  if (local.derivatives.empty()) local.fill_derivatives_by_differences();

  const int N = static_cast<int>(local.grid.size());
  IntegralCheckResult result;
  result.residual.resize(N);
  result.residual[0] = 0;

  double integral = 0;
  for (int k = 0; k + 1 < N; ++k) {
    const int i = audit.active[k].front();
    const int j = audit.active[k + 1].front();
    const double x0 = local.grid[k], x1 = local.grid[k + 1];
    if (i == j) {
      integral += 0.5 * (local.derivatives[i][k] + local.derivatives[i][k + 1]) * (x1 - x0);
    } else {
      const double xc = crossing_point(local, i, j, k);
      const double di = member_derivative_at(local, i, k, xc);
      const double dj = member_derivative_at(local, j, k, xc);
      integral += 0.5 * (local.derivatives[i][k] + di) * (xc - x0);
      integral += 0.5 * (dj + local.derivatives[j][k + 1]) * (x1 - xc);
    }
    result.residual[k + 1] = audit.envelope[k + 1] - audit.envelope[0] - integral;
    result.max_abs_residual = std::max(result.max_abs_residual,
                                       std::fabs(result.residual[k + 1]));
  }
  return result;
}

LipschitzAuditResult lipschitz_audit(const SampledFamily& family, const EnvelopeAudit& audit,
                                     double tolerance) {
  validate(family);
  SampledFamily local = family;
  if (local.derivatives.empty()) local.fill_derivatives_by_differences();

  LipschitzAuditResult result;
  result.envelope_quotient = audit.lipschitz_estimate;
  for (const auto& d : local.derivatives)
    for (double v : d) result.member_bound = std::max(result.member_bound, std::fabs(v));
  result.pass = result.envelope_quotient <= result.member_bound + tolerance;
  return result;
}

}  // namespace comag
