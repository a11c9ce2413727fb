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

#include "hioco/baselines.hpp"

#include "hioco/engine.hpp"
#include "hioco/errors.hpp"

namespace hioco {

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::MasterOnly: return "master-only";
    case BaselineKind::WorkerOnly: return "worker-only";
    case BaselineKind::SingleStep: return "single-step";
    case BaselineKind::DelayedCentralizedOgd: return "delayed-centralized-ogd";
  }
  throw ContractError("unknown baseline kind");
}

BaselineKind baseline_kind_from_string(const std::string& s) {
  for (auto k : all_baselines())
    if (to_string(k) == s) return k;
  throw ParameterError("unknown baseline '" + s + "'");
}

const std::vector<BaselineKind>& all_baselines() {
  static const std::vector<BaselineKind> kinds{BaselineKind::MasterOnly, BaselineKind::WorkerOnly,
                                               BaselineKind::SingleStep, BaselineKind::DelayedCentralizedOgd};
  return kinds;
}

HiocoParams baseline_params(BaselineKind kind, const BaselineOptions& options) {
  if (options.steps < 1) throw ParameterError("baseline steps must be at least 1");
  HiocoParams p;
  p.alpha = options.alpha;
  p.compression = options.compression;
  p.init_seed = options.init_seed;
  switch (kind) {
    case BaselineKind::MasterOnly:
      p.J_l = 0;
      p.J_r = options.steps;
      break;
    case BaselineKind::WorkerOnly:
      p.J_l = options.steps;
      p.J_r = 0;
      break;
    case BaselineKind::SingleStep:
      p.J_l = 1;
      p.J_r = 0;
      break;
    case BaselineKind::DelayedCentralizedOgd:
      p.J_l = 0;
      p.J_r = 1;
      p.compression = IdentityScheme{};
      break;
  }
  return p;
}

RunTrace run_baseline(BaselineKind kind, const CostScenario& scenario, const DelayConfig& delays,
                      const BaselineOptions& options) {
  const EngineMode mode = delays.tau_l == 0 ? EngineMode::ZeroLocalDelay : EngineMode::LocalDelay;
  return run_episode(scenario, baseline_params(kind, options), delays, mode, EpisodeOptions{true, to_string(kind)});
}

}  // namespace hioco
