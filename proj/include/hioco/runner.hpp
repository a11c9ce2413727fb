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

// Experiment orchestration: sweep expansion, parallel execution and output
// files.
//
// Every sweep point draws its warm-up stream from derive_seed(seed, index),
// so a point's results do not depend on scheduling or on the other points.

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hioco/baselines.hpp"
#include "hioco/bounds.hpp"
#include "hioco/config.hpp"
#include "hioco/cost_library.hpp"
#include "hioco/trace.hpp"

namespace hioco {

struct SweepPoint {
  std::size_t index = 0;
  std::optional<BaselineKind> baseline;  // nullopt: the algorithm itself
  HiocoParams params;                    // alpha filled at resolution
  DelayConfig delays;
  EngineMode mode = EngineMode::ZeroLocalDelay;
  std::string label;
};

/// Cartesian product of the sweep axes (each defaulting to the base config),
/// with duplicate configurations removed. An empty sweep gives one point.
std::vector<SweepPoint> expand_sweep(const ExperimentConfig& config, double alpha);

struct PointResult {
  SweepPoint point;
  RunTrace trace;
  BoundReport report;
};

struct RunOutcome {
  std::vector<PointResult> results;
  std::vector<std::string> log;
  double gamma = 0.0;

  bool bounds_hold() const;
};

/// Generates the scenario, resolves "auto" fields and runs every point on
/// `threads` workers (0: hardware concurrency).
RunOutcome execute(const ExperimentConfig& config, const CostScenario& scenario, unsigned threads = 0);
RunOutcome execute(const ExperimentConfig& config);

inline constexpr const char* kComparisonCsvHeader =
    "label,baseline,J_l,J_r,tau_u,tau_d,tau_r,tau_l,tau,compression,mode,mu,L,D,R,alpha,gamma,eta,beta,eta_J,"
    "regret,path,path2,delta,delta2,grad_energy,bound_i,bound_i_sharp,bound_ii,xi_ii,bound_thm2_i,bound_thm2,"
    "xi_thm2,bounds_hold";

/// One row per point; invalid conditional bounds are written as "invalid".
void write_comparison_csv(std::ostream& os, const RunOutcome& outcome, const std::string& comment = "");

/// Prints a fixed-width summary table.
void print_summary(std::ostream& os, const RunOutcome& outcome);

/// Writes trace_<label>.csv and report_<label>.json per point (traces only
/// when enabled), comparison.csv and resolved_config.json into `dir`.
void write_outputs(const ExperimentConfig& config, const RunOutcome& outcome, const std::string& dir);

}  // namespace hioco
