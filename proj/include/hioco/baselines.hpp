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

// Comparator configurations of the hierarchical engine.
//
//   master-only              J_l = 0, J_r = steps
//   worker-only              J_l = steps, J_r = 0 (the master only relays
//                            global information at the stale decision)
//   single-step              J_l = 1, J_r = 0
//   delayed-centralized-ogd  J_l = 0, J_r = 1, exact data

#pragma once

#include <string>
#include <vector>

#include "hioco/cost_library.hpp"
#include "hioco/delay_network.hpp"
#include "hioco/trace.hpp"

namespace hioco {

enum class BaselineKind { MasterOnly, WorkerOnly, SingleStep, DelayedCentralizedOgd };

std::string to_string(BaselineKind kind);
BaselineKind baseline_kind_from_string(const std::string& s);
const std::vector<BaselineKind>& all_baselines();

struct BaselineOptions {
  double alpha = 1.0;
  int steps = 2;  // used by master-only and worker-only
  CompressionScheme compression = IdentityScheme{};
  std::uint64_t init_seed = 0;
};

/// Engine parameters realizing the baseline.
HiocoParams baseline_params(BaselineKind kind, const BaselineOptions& options);

/// Runs the baseline in zero-local-delay mode when tau_l = 0, local-delay
/// mode otherwise. The trace label is the baseline name.
RunTrace run_baseline(BaselineKind kind, const CostScenario& scenario, const DelayConfig& delays,
                      const BaselineOptions& options);

}  // namespace hioco
