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

// Dynamic regret and variation measures over completed traces.
//
// Conventions: x_0^* := x_1^*, so the first path-length increment is zero.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hioco/cost_library.hpp"
#include "hioco/trace.hpp"

namespace hioco {

inline constexpr const char* kPathConvention = "x_0^* := x_1^* (first path increment is zero)";

/// sum_t (f_t(x_t) - f_t(x_t^*)).
double dynamic_regret(const RunTrace& trace);

/// sum_t ||x_t^* - x_{t-1}^*||.
double path_length(const RunTrace& trace);
/// sum_t ||x_t^* - x_{t-1}^*||^2.
double squared_path_length(const RunTrace& trace);

/// Certified sup over X of the error of both gradient estimators at one slot.
struct EstimatorErrorSup {
  double master = 0.0;
  double worker = 0.0;
  double value() const { return master > worker ? master : worker; }
};

/// Closed form for the coupled quadratic. Each estimator's error is affine in
/// x, e(x) = M x - v, so sup_X ||e|| <= ||M||_2 x_max + ||v||. The master
/// estimator uses recovered data of slot t - lag for every worker; the
/// worker estimator uses its own data of slot t - tau_l and the recovered
/// data of the others, with the global information evaluated at x. Each
/// component is the larger of its error against f_t and against the cost
/// of the slot its own data belong to. Zero during warm-up.
EstimatorErrorSup estimator_error_sup(const CostScenario& scenario, const HiocoParams& params,
                                      const DelayConfig& delays, EngineMode mode, std::size_t t);

struct GradientErrorMeasures {
  double delta = 0.0;   // sum_t eps_t
  double delta2 = 0.0;  // sum_t eps_t^2
};

/// Fills grad_err_sup (and both components) of every slot and returns the
/// accumulated measures. Throws NotImplementedError for other cost families.
GradientErrorMeasures gradient_error_measures(const CostScenario& scenario, RunTrace& trace);

/// sum_t ||grad f_t(x_t^*)||^2.
double optimum_gradient_energy(const CostScenario& scenario);

struct TraceRow {
  std::size_t t = 0;
  double cost = 0.0;
  double opt_cost = 0.0;
  double regret_cum = 0.0;
  double path_cum = 0.0;
  double path2_cum = 0.0;
  double delta_cum = 0.0;
  double delta2_cum = 0.0;
  double track_err = 0.0;  // ||x_t - x_t^*||
};

/// Per-slot columns with prefix sums.
std::vector<TraceRow> trace_rows(const RunTrace& trace);

inline constexpr const char* kTraceCsvHeader =
    "t,cost,opt_cost,regret_cum,path_cum,path2_cum,delta_cum,delta2_cum,track_err";

/// Writes the header line and one row per slot, full precision. When
/// `comment` is non-empty it is emitted first as a `# ...` line.
void write_trace_csv(std::ostream& os, const RunTrace& trace, const std::string& comment = "");

/// Formats doubles with 17 significant digits.
std::string format_double(double v);

}  // namespace hioco
