// Copyright 2026 The HiOCO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Contraction constants of one estimated projected-gradient step and the
// dynamic-regret bounds built from them.
//
// For alpha >= L and gamma in (0, 2 mu), a step z = P_X(y - g_hat / alpha)
// satisfies
//
//   ||z - x*||^2 <= eta ||y - x*||^2 + beta ||g_hat - grad f(y)||^2,
//   eta  = (alpha - mu) / (alpha + mu - gamma),
//   beta = 1 / (gamma (alpha + mu - gamma)).
//
// All bound functions are pure: identical inputs give bit-identical outputs.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hioco/cost_library.hpp"
#include "hioco/trace.hpp"

namespace hioco {

struct Lemma2Constants {
  double eta = 0.0;
  double beta = 0.0;
};

/// Throws ParameterError unless mu > 0, alpha >= mu and gamma in (0, 2 mu).
Lemma2Constants lemma2_constants(double alpha, double mu, double gamma);

/// f(x) = 1/2 x^T H x - linear^T x over a product set, with mu I <= H <= L I.
struct QuadraticInstance {
  Mat hessian;
  Vec linear;
  FeasibleSet set;
  double mu = 0.0;
  double L = 0.0;

  Vec gradient(const Vec& x) const { return hessian * x - linear; }
};

struct Lemma2Verdict {
  double lhs = 0.0;    // ||z - x*||^2
  double rhs = 0.0;    // eta ||y - x*||^2 + beta ||e||^2
  double slack = 0.0;  // rhs - lhs
  GlobalDecision z;
};

/// Takes the step from y with gradient grad f(y) + error and evaluates both
/// sides against the given minimizer. Throws ParameterError when alpha < L.
Lemma2Verdict lemma2_check(const QuadraticInstance& instance, const GlobalDecision& minimizer,
                           const GlobalDecision& y, double gamma, double alpha, const Vec& error);

struct BoundInputs {
  double mu = 0.0;
  double L = 0.0;
  double D = 0.0;
  double R = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;
  std::size_t tau_r = 1;
  std::size_t tau_l = 0;
  int J_l = 1;
  int J_r = 1;
  double path = 0.0;         // Pi_T^*
  double path2 = 0.0;        // Pi_{2,T}^*
  double delta = 0.0;        // Delta_T
  double delta2 = 0.0;       // Delta_{2,T}
  double grad_energy = 0.0;  // sum_t ||grad f_t(x_t^*)||^2
  std::size_t horizon = 0;

  std::size_t tau() const { return tau_r + tau_l; }
  int total_steps() const { return J_l + J_r; }
};

/// A second-order bound, present only when its step condition holds.
struct ConditionalBound {
  std::optional<double> value;
  double xi = 0.0;
  /// k * eta^(J_l + J_r), where k = 2 or 4; the bound needs condition < 1.
  double condition = 0.0;

  bool valid() const { return value.has_value(); }
};

/// tau D R + D / (1 - sqrt(eta^J)) (tau R + tau Pi + sqrt(beta) / (1 - sqrt(eta)) Delta).
double first_order_bound(const BoundInputs& in, std::size_t tau);

/// The same argument keeping the proof's sharper constants: the warm-up
/// term carries sqrt(eta^J), the path term (tau_l + sqrt(eta^J_l) tau_r) and
/// the error term recursion_error_coefficient().
double first_order_bound_sharp(const BoundInputs& in);

/// (sqrt(eta^J_l) (1 - sqrt(eta^J_r)) + 1 - sqrt(eta^J_l)) / (1 - sqrt(eta)).
/// Zero when eta = 0.
double recursion_error_coefficient(double eta, int J_l, int J_r);

/// Second-order bound with remote delay only, valid when 2 eta^J < 1.
ConditionalBound second_order_bound(const BoundInputs& in);

/// Second-order bound with local delay, valid when 4 eta^J < 1. Uses tau.
ConditionalBound local_delay_bound(const BoundInputs& in);

/// Minimizer over xi > 0 of S / (2 xi) + (L + xi) K / 2, i.e. sqrt(S / K);
/// L when S = 0 or K = 0.
double optimal_xi(double S, double K, double L);

struct BoundReport {
  BoundInputs inputs;
  EngineMode mode = EngineMode::ZeroLocalDelay;
  Lemma2Constants constants;
  double bound_i = 0.0;        // first_order_bound with tau_r
  double bound_i_sharp = 0.0;  // diagnostic only
  ConditionalBound bound_ii;
  double bound_thm2_i = 0.0;   // first_order_bound with tau
  ConditionalBound bound_thm2;
  double regret = 0.0;
  std::string conventions;

  struct Check {
    std::string name;
    double bound = 0.0;
    bool holds = false;
  };
  /// Bounds that apply to the run's mode and condition: bound_i and bound_ii
  /// in zero-local-delay mode, bound_thm2_i and bound_thm2 otherwise.
  std::vector<Check> checks() const;
  bool all_hold() const;
  /// Smallest applicable bound.
  double tightest() const;
};

/// Assembles bounds and regret for one run.
BoundReport evaluate_bounds(const BoundInputs& inputs, EngineMode mode, double regret);

/// Collects constants and measures from a scenario and a trace whose error
/// measures are filled. gamma <= 0 selects gamma = mu.
BoundInputs bound_inputs(const CostScenario& scenario, const RunTrace& trace, double gamma = 0.0);

/// Convenience: fills the trace's error measures, then evaluates.
BoundReport bound_report(const CostScenario& scenario, RunTrace& trace, double gamma = 0.0);

void to_json(nlohmann::json& j, const BoundInputs& in);
void to_json(nlohmann::json& j, const BoundReport& r);

/// The per-run inequality assembled from the per-slot contractions in
/// zero-local-delay form (tau_l = 0 reduces the local-delay form to it):
///
///   (1 - sqrt(eta^J)) sum_{t > tau} ||x_t - x_t^*|| - sqrt(eta^J) sum_{t <= tau} ||x_t - x_t^*||
///     <= (tau_l + sqrt(eta^J_l) tau_r) Pi + coefficient sqrt(beta) Delta.
struct RecursionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  double coefficient = 0.0;
};

RecursionCheck recursion_check(const RunTrace& trace, const BoundInputs& inputs);

/// Per-slot form with realized estimation errors. For every protocol slot,
/// the master stage satisfies
///   ||x_hat - x_s^*|| <= sqrt(eta^J_r) ||x_s - x_s^*|| + c_r sqrt(beta) e_master,
/// with s the master's data slot, and the worker stage satisfies
///   ||x_t - x_w^*|| <= sqrt(eta^J_l) ||x_hat - x_w^*|| + c_l sqrt(beta) e_worker,
/// with w the worker's data slot and c_j = (1 - sqrt(eta^j)) / (1 - sqrt(eta)).
/// Returns the smallest slack over both stages and all slots.
double per_slot_contraction_slack(const CostScenario& scenario, const RunTrace& trace, double gamma = 0.0);

}  // namespace hioco
