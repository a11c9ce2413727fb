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

#include "hioco/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hioco/engine.hpp"
#include "hioco/errors.hpp"
#include "hioco/metrics.hpp"

namespace hioco {

namespace {

double eta_power(double eta, int j) { return std::pow(eta, j); }

// (1 - sqrt(eta^j)) / (1 - sqrt(eta)) = sum_{i<j} sqrt(eta)^i, finite at eta = 0.
double geometric(double eta, int j) {
  const double r = std::sqrt(eta);
  double sum = 0.0;
  double term = 1.0;
  for (int i = 0; i < j; ++i) {
    sum += term;
    term *= r;
  }
  return sum;
}

ConditionalBound second_order(const BoundInputs& in, std::size_t tau, double k, double path_coeff,
                              double delta_coeff) {
  const Lemma2Constants c = lemma2_constants(in.alpha, in.mu, in.gamma);
  ConditionalBound out;
  out.condition = k * eta_power(c.eta, in.total_steps());
  if (!(out.condition < 1.0)) return out;
  const double t = static_cast<double>(tau);
  const double r2 = in.R * in.R;
  const double bracket =
      t * r2 + path_coeff * t * t * in.path2 + delta_coeff * c.beta / (1.0 - c.eta) * in.delta2;
  const double K = t * r2 + bracket / (1.0 - out.condition);
  out.xi = optimal_xi(in.grad_energy, K, in.L);
  out.value = in.grad_energy / (2.0 * out.xi) + (in.L + out.xi) / 2.0 * K;
  return out;
}

void check_inputs(const BoundInputs& in) {
  if (in.J_l < 0 || in.J_r < 0 || in.total_steps() < 1) throw ParameterError("need J_l, J_r >= 0 and J_l + J_r >= 1");
  if (in.tau_r < 1) throw ParameterError("round-trip delay must be at least 1");
  if (!(in.D >= 0.0) || !(in.R >= 0.0)) throw ParameterError("D and R must be nonnegative");
  if (!(in.path >= 0.0) || !(in.path2 >= 0.0) || !(in.delta >= 0.0) || !(in.delta2 >= 0.0) ||
      !(in.grad_energy >= 0.0))
    throw ParameterError("variation measures must be nonnegative");
}

}  // namespace

Lemma2Constants lemma2_constants(double alpha, double mu, double gamma) {
  if (!(mu > 0.0)) throw ParameterError("mu must be positive");
  if (!(alpha >= mu)) throw ParameterError("alpha must be at least mu");
  if (!(gamma > 0.0 && gamma < 2.0 * mu)) throw ParameterError("gamma must lie in (0, 2 mu)");
  const double denom = alpha + mu - gamma;
  return {(alpha - mu) / denom, 1.0 / (gamma * denom)};
}

Lemma2Verdict lemma2_check(const QuadraticInstance& instance, const GlobalDecision& minimizer,
                           const GlobalDecision& y, double gamma, double alpha, const Vec& error) {
  if (!(alpha >= instance.L)) throw ParameterError("alpha must be at least L");
  if (!(instance.L >= instance.mu)) throw ParameterError("L must be at least mu");
  const Lemma2Constants c = lemma2_constants(alpha, instance.mu, gamma);
  const Vec yf = y.flat();
  if (error.size() != yf.size()) throw ContractError("error vector has the wrong dimension");
  const Vec g = instance.gradient(yf) + error;
  Lemma2Verdict out;
  out.z = gradient_step(instance.set, y, GlobalDecision::from_flat(g, y.dims()), alpha);
  const Vec xs = minimizer.flat();
  out.lhs = (out.z.flat() - xs).squaredNorm();
  out.rhs = c.eta * (yf - xs).squaredNorm() + c.beta * error.squaredNorm();
  out.slack = out.rhs - out.lhs;
  return out;
}

double recursion_error_coefficient(double eta, int J_l, int J_r) {
  const double sl = std::sqrt(eta_power(eta, J_l));
  return sl * geometric(eta, J_r) + geometric(eta, J_l);
}

double first_order_bound(const BoundInputs& in, std::size_t tau) {
  check_inputs(in);
  const Lemma2Constants c = lemma2_constants(in.alpha, in.mu, in.gamma);
  const double t = static_cast<double>(tau);
  const double contraction = std::sqrt(eta_power(c.eta, in.total_steps()));
  const double inner = t * in.R + t * in.path + std::sqrt(c.beta) / (1.0 - std::sqrt(c.eta)) * in.delta;
  return t * in.D * in.R + in.D / (1.0 - contraction) * inner;
}

double first_order_bound_sharp(const BoundInputs& in) {
  check_inputs(in);
  const Lemma2Constants c = lemma2_constants(in.alpha, in.mu, in.gamma);
  const double t = static_cast<double>(in.tau());
  const double contraction = std::sqrt(eta_power(c.eta, in.total_steps()));
  const double path_coeff =
      static_cast<double>(in.tau_l) + std::sqrt(eta_power(c.eta, in.J_l)) * static_cast<double>(in.tau_r);
  const double inner = contraction * t * in.R + path_coeff * in.path +
                       recursion_error_coefficient(c.eta, in.J_l, in.J_r) * std::sqrt(c.beta) * in.delta;
  return t * in.D * in.R + in.D / (1.0 - contraction) * inner;
}

double optimal_xi(double S, double K, double L) {
  if (S > 0.0 && K > 0.0) return std::sqrt(S / K);
  return L;
}

ConditionalBound second_order_bound(const BoundInputs& in) {
  check_inputs(in);
  return second_order(in, in.tau_r, 2.0, 2.0, 2.0);
}

ConditionalBound local_delay_bound(const BoundInputs& in) {
  check_inputs(in);
  return second_order(in, in.tau(), 4.0, 6.0, 4.0);
}

std::vector<BoundReport::Check> BoundReport::checks() const {
  std::vector<Check> out;
  auto add = [&](const std::string& name, double b) { out.push_back({name, b, regret <= b}); };
  if (mode == EngineMode::ZeroLocalDelay) {
    add("bound_i", bound_i);
    if (bound_ii.valid()) add("bound_ii", *bound_ii.value);
  } else {
    add("bound_thm2_i", bound_thm2_i);
    if (bound_thm2.valid()) add("bound_thm2", *bound_thm2.value);
  }
  return out;
}

bool BoundReport::all_hold() const {
  const auto cs = checks();
  return std::all_of(cs.begin(), cs.end(), [](const Check& c) { return c.holds; });
}

double BoundReport::tightest() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : checks()) best = std::min(best, c.bound);
  return best;
}

BoundReport evaluate_bounds(const BoundInputs& inputs, EngineMode mode, double regret) {
  check_inputs(inputs);
  if (mode == EngineMode::ZeroLocalDelay && inputs.tau_l != 0)
    throw ParameterError("zero-local-delay mode requires tau_l = 0");
  if (!(inputs.alpha >= inputs.L)) throw ParameterError("alpha must be at least L");
  BoundReport r;
  r.inputs = inputs;
  r.mode = mode;
  r.constants = lemma2_constants(inputs.alpha, inputs.mu, inputs.gamma);
  r.bound_i = first_order_bound(inputs, inputs.tau_r);
  r.bound_i_sharp = first_order_bound_sharp(inputs);
  r.bound_ii = second_order_bound(inputs);
  r.bound_thm2_i = first_order_bound(inputs, inputs.tau());
  r.bound_thm2 = local_delay_bound(inputs);
  r.regret = regret;
  r.conventions = std::string(kPathConvention) +
                  "; x_t for t <= tau drawn uniformly from X; eps_t = 0 for t <= tau";
  return r;
}

BoundInputs bound_inputs(const CostScenario& scenario, const RunTrace& trace, double gamma) {
  if (!trace.error_measures_filled) throw ContractError("trace error measures are not filled");
  if (trace.slots.size() != scenario.horizon()) throw ContractError("trace and scenario horizons differ");
  const auto& k = scenario.constants();
  BoundInputs in;
  in.mu = k.mu;
  in.L = k.L;
  in.D = k.D;
  in.R = k.R;
  in.alpha = trace.params.alpha;
  in.gamma = gamma > 0.0 ? gamma : k.mu;
  in.tau_r = trace.delays.round_trip();
  in.tau_l = trace.delays.tau_l;
  in.J_l = trace.params.J_l;
  in.J_r = trace.params.J_r;
  in.path = path_length(trace);
  in.path2 = squared_path_length(trace);
  for (const auto& s : trace.slots) {
    in.delta += s.grad_err_sup;
    in.delta2 += s.grad_err_sup * s.grad_err_sup;
  }
  in.grad_energy = optimum_gradient_energy(scenario);
  in.horizon = scenario.horizon();
  return in;
}

BoundReport bound_report(const CostScenario& scenario, RunTrace& trace, double gamma) {
  gradient_error_measures(scenario, trace);
  return evaluate_bounds(bound_inputs(scenario, trace, gamma), trace.mode, dynamic_regret(trace));
}

void to_json(nlohmann::json& j, const BoundInputs& in) {
  j = nlohmann::json{{"mu", in.mu},
                     {"L", in.L},
                     {"D", in.D},
                     {"R", in.R},
                     {"alpha", in.alpha},
                     {"gamma", in.gamma},
                     {"tau_r", in.tau_r},
                     {"tau_l", in.tau_l},
                     {"tau", in.tau()},
                     {"J_l", in.J_l},
                     {"J_r", in.J_r},
                     {"T", in.horizon}};
}

namespace {

nlohmann::json conditional_json(const ConditionalBound& b) {
  nlohmann::json j{{"condition", b.condition}};
  if (b.valid()) {
    j["value"] = *b.value;
    j["xi"] = b.xi;
  } else {
    j["value"] = "condition violated";
  }
  return j;
}

}  // namespace

void to_json(nlohmann::json& j, const BoundReport& r) {
  nlohmann::json constants = r.inputs;
  constants["eta"] = r.constants.eta;
  constants["beta"] = r.constants.beta;
  constants["eta_J"] = eta_power(r.constants.eta, r.inputs.total_steps());
  const auto checks = r.checks();
  nlohmann::json checked = nlohmann::json::array();
  for (const auto& c : checks) checked.push_back({{"name", c.name}, {"bound", c.bound}, {"holds", c.holds}});
  j = nlohmann::json{
      {"mode", to_string(r.mode)},
      {"constants", constants},
      {"measures",
       {{"path", r.inputs.path},
        {"path2", r.inputs.path2},
        {"delta", r.inputs.delta},
        {"delta2", r.inputs.delta2},
        {"grad_energy", r.inputs.grad_energy}}},
      {"bound_i", r.bound_i},
      {"bound_i_sharp", r.bound_i_sharp},
      {"bound_ii", conditional_json(r.bound_ii)},
      {"bound_thm2_i", r.bound_thm2_i},
      {"bound_thm2", conditional_json(r.bound_thm2)},
      {"regret", r.regret},
      {"checks", checked},
      {"all_hold", r.all_hold()},
      {"conventions", r.conventions},
  };
}

RecursionCheck recursion_check(const RunTrace& trace, const BoundInputs& in) {
  check_inputs(in);
  const Lemma2Constants c = lemma2_constants(in.alpha, in.mu, in.gamma);
  const std::size_t tau = in.tau();
  const double contraction = std::sqrt(eta_power(c.eta, in.total_steps()));
  double head = 0.0;
  double tail = 0.0;
  for (const auto& s : trace.slots) {
    const double e = distance(s.executed, s.optimum);
    (s.t <= tau ? head : tail) += e;
  }
  RecursionCheck out;
  out.coefficient = recursion_error_coefficient(c.eta, in.J_l, in.J_r);
  out.lhs = (1.0 - contraction) * tail - contraction * head;
  out.rhs = (static_cast<double>(in.tau_l) + std::sqrt(eta_power(c.eta, in.J_l)) * static_cast<double>(in.tau_r)) *
                in.path +
            out.coefficient * std::sqrt(c.beta) * in.delta;
  out.slack = out.rhs - out.lhs;
  return out;
}

double per_slot_contraction_slack(const CostScenario& scenario, const RunTrace& trace, double gamma) {
  const double g = gamma > 0.0 ? gamma : scenario.mu();
  const Lemma2Constants c = lemma2_constants(trace.params.alpha, scenario.mu(), g);
  const double sb = std::sqrt(c.beta);
  const double rr = std::sqrt(eta_power(c.eta, trace.params.J_r));
  const double rl = std::sqrt(eta_power(c.eta, trace.params.J_l));
  const double cr = geometric(c.eta, trace.params.J_r);
  const double cl = geometric(c.eta, trace.params.J_l);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& s : trace.slots) {
    if (s.warmup) continue;
    const auto& d = s.diag;
    if (d.master_data_slot == 0 || d.worker_data_slot == 0)
      throw ContractError("trace was recorded without diagnostics");
    const auto& xs_m = scenario.per_slot_optimum(d.master_data_slot).x;
    const auto& start = trace.slots[d.master_data_slot - 1].executed;
    const double master_lhs = distance(d.master_output, xs_m);
    const double master_rhs = rr * distance(start, xs_m) + cr * sb * d.master_error;
    const auto& xs_w = scenario.per_slot_optimum(d.worker_data_slot).x;
    const double worker_lhs = distance(s.executed, xs_w);
    const double worker_rhs = rl * distance(d.master_output, xs_w) + cl * sb * d.worker_error;
    worst = std::min({worst, master_rhs - master_lhs, worker_rhs - worker_lhs});
  }
  return worst;
}

}  // namespace hioco
