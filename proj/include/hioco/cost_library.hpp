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

// Global cost family, time-varying data generation and per-slot optima.
//
// The built-in family is the coupled regularized least-squares cost
//
//   f_t(x) = 1/2 || sum_c A_t^c x^c - sum_c b_t^c ||^2 + mu/2 ||x||^2,
//
// whose partial gradient for worker c splits into a local part and a
// cross-worker aggregate:
//
//   h(d^c, x^c, g) = A^c^T (A^c x^c - b^c + g) + mu x^c,
//   g^c            = sum_{l != c} (A^l x^l - b^l).

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hioco/core_model.hpp"
#include "hioco/local_data.hpp"

namespace hioco {

/// Smooth, strongly convex cost families expressed through the h/g split.
class CostModel {
 public:
  virtual ~CostModel() = default;

  virtual std::string name() const = 0;
  /// Strong-convexity modulus.
  virtual double mu() const = 0;

  virtual double cost(DataView data, const GlobalDecision& x) const = 0;

  /// h: partial gradient of worker c from its own data, its own block and
  /// the global-information vector.
  virtual Vec local_gradient(const LocalData& own, const DecisionBlock& xc, const Vec& ginfo) const = 0;

  /// g: aggregate of the other workers' data and blocks. Block c of `x` is
  /// ignored.
  virtual Vec global_info(DataView data, WorkerId c, const GlobalDecision& x) const = 0;

  /// Full gradient, block c equal to local_gradient(global_info(c)).
  virtual GlobalDecision gradient(DataView data, const GlobalDecision& x) const;

  /// Smoothness constant of the slot's cost.
  virtual double smoothness(DataView data) const = 0;

  /// Upper bound on ||grad f(x)|| over all x with ||x|| <= max_norm.
  virtual double gradient_bound(DataView data, double max_norm) const = 0;
};

class CoupledQuadratic final : public CostModel {
 public:
  explicit CoupledQuadratic(double mu);

  std::string name() const override { return "coupled-quadratic"; }
  double mu() const override { return mu_; }

  double cost(DataView data, const GlobalDecision& x) const override;
  Vec local_gradient(const LocalData& own, const DecisionBlock& xc, const Vec& ginfo) const override;
  Vec global_info(DataView data, WorkerId c, const GlobalDecision& x) const override;
  GlobalDecision gradient(DataView data, const GlobalDecision& x) const override;
  double smoothness(DataView data) const override;
  double gradient_bound(DataView data, double max_norm) const override;

  /// Q = [A^1 ... A^C].
  static Mat coupling(DataView data);
  /// b = sum_c b^c.
  static Vec target(DataView data);
  /// Hessian Q^T Q + mu I.
  Mat hessian(DataView data) const;

 private:
  double mu_;
};

struct SlotOptimum {
  GlobalDecision x;
  double cost = 0.0;
  /// True when the unconstrained minimizer is feasible (zero gradient at x).
  bool interior = false;
  int iterations = 0;
};

struct MinimizeOptions {
  double tolerance = 1e-10;
  int max_iterations = 500000;
};

/// Minimizer over the product set of 1/2 x^T H x - lin^T x by projected
/// gradient descent with step 1/L, stopped once the certified distance to the
/// minimizer drops below tolerance * max(1, ||x||). `mu` and `L` bound the
/// spectrum of H.
SlotOptimum minimize_quadratic(const Mat& hessian, const Vec& linear, const FeasibleSet& set, double mu,
                               double L, const MinimizeOptions& options = {});

/// Minimizer of the coupled quadratic over the product set. Uses the normal
/// equations when their solution is feasible, otherwise projected gradient
/// descent with a certified distance-to-optimum stopping rule.
SlotOptimum minimize_coupled(const CoupledQuadratic& model, DataView data, const FeasibleSet& set,
                             const MinimizeOptions& options = {});

/// Projected gradient descent only; exposed so it can be checked against the
/// closed form.
SlotOptimum minimize_coupled_iterative(const CoupledQuadratic& model, DataView data,
                                       const FeasibleSet& set, const MinimizeOptions& options = {});

enum class DriftKind { Static, RandomWalk, DecayingWalk };

std::string to_string(DriftKind kind);
DriftKind drift_kind_from_string(const std::string& s);

/// How the targets b_t move over time. Random walk moves sum_c b_t^c by a
/// vector of norm sigma per slot, decaying walk by sigma * t^-rho.
struct DriftModel {
  DriftKind kind = DriftKind::Static;
  double sigma = 0.0;
  double rho = 0.0;
  std::uint64_t seed = 0;
};

/// Everything needed to regenerate a scenario deterministically.
struct ScenarioSpec {
  std::vector<std::size_t> dims;  // n^c per worker, size C
  std::size_t m = 1;
  std::size_t horizon = 1;
  double mu = 1.0;
  double a_max = 1.0;
  DriftModel drift;
  std::uint64_t seed = 0;
  std::vector<SetDescriptor> feasible;  // one per worker

  std::size_t workers() const { return dims.size(); }
  void validate() const;
};

void to_json(nlohmann::json& j, const SetDescriptor& s);
void from_json(const nlohmann::json& j, SetDescriptor& s);
void to_json(nlohmann::json& j, const DriftModel& d);
void from_json(const nlohmann::json& j, DriftModel& d);
void to_json(nlohmann::json& j, const ScenarioSpec& s);
void from_json(const nlohmann::json& j, ScenarioSpec& s);

struct ScenarioConstants {
  double mu = 0.0;
  double L = 0.0;  // max_t lambda_max(Q_t^T Q_t) + mu
  double D = 0.0;  // certified bound on ||grad f_t|| over X
  double R = 0.0;  // diameter of X
  double x_max = 0.0;
  std::vector<double> slot_smoothness;  // lambda_max(Q_t^T Q_t) + mu per slot
};

/// Time-indexed data for t = 1..T plus derived constants and the per-slot
/// optima. Immutable after construction.
class CostScenario {
 public:
  CostScenario(std::shared_ptr<const CoupledQuadratic> model, FeasibleSet feasible,
               std::vector<std::vector<LocalData>> data, std::optional<ScenarioSpec> spec = std::nullopt);

  static CostScenario generate(const ScenarioSpec& spec);

  std::size_t horizon() const { return data_.size(); }
  std::size_t workers() const { return feasible_.workers(); }
  std::vector<std::size_t> dims() const { return feasible_.dims(); }
  std::size_t info_dim() const { return m_; }
  double mu() const { return model_->mu(); }

  const CoupledQuadratic& model() const { return *model_; }
  const FeasibleSet& feasible() const { return feasible_; }
  const ScenarioConstants& constants() const { return constants_; }
  const std::optional<ScenarioSpec>& spec() const { return spec_; }

  DataView data(std::size_t t) const;
  const LocalData& data(std::size_t t, WorkerId c) const;

  double eval_cost(std::size_t t, const GlobalDecision& x) const;
  GlobalDecision gradient(std::size_t t, const GlobalDecision& x) const;
  Vec local_gradient(std::size_t t, WorkerId c, const DecisionBlock& xc, const Vec& ginfo) const;
  Vec global_info(std::size_t t, WorkerId c, const GlobalDecision& x) const;
  const SlotOptimum& per_slot_optimum(std::size_t t) const;

 private:
  void check_slot(std::size_t t) const;

  std::shared_ptr<const CoupledQuadratic> model_;
  FeasibleSet feasible_;
  std::vector<std::vector<LocalData>> data_;  // data_[t-1][c]
  std::optional<ScenarioSpec> spec_;
  std::size_t m_ = 0;
  ScenarioConstants constants_;
  std::vector<SlotOptimum> optima_;
};

}  // namespace hioco
