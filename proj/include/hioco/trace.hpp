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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hioco/compression.hpp"
#include "hioco/core_model.hpp"
#include "hioco/delay_network.hpp"

namespace hioco {

struct HiocoParams {
  double alpha = 1.0;
  int J_l = 1;  // worker steps
  int J_r = 1;  // master steps
  CompressionScheme compression = IdentityScheme{};
  std::uint64_t init_seed = 0;

  int total_steps() const { return J_l + J_r; }
};

enum class EngineMode { ZeroLocalDelay, LocalDelay };

std::string to_string(EngineMode mode);
EngineMode engine_mode_from_string(const std::string& s);

/// Per-slot internals recorded by the driver for contraction checks.
struct SlotDiagnostics {
  GlobalDecision master_output;      // intermediate decision after the master's steps
  std::size_t master_data_slot = 0;  // slot of the data behind the master's gradients
  std::size_t worker_data_slot = 0;  // slot of the workers' own data
  /// Largest realized ||grad_hat(y) - grad f(y)|| over the master steps,
  /// measured against the cost of master_data_slot.
  double master_error = 0.0;
  /// Same over the worker steps, against the cost of worker_data_slot.
  double worker_error = 0.0;
};

struct SlotRecord {
  std::size_t t = 0;
  bool warmup = false;
  GlobalDecision executed;
  double cost = 0.0;
  GlobalDecision optimum;
  double opt_cost = 0.0;
  /// Certified sup over X of the gradient-estimation error, max of the
  /// master and worker estimators. Filled by gradient_error_measures().
  double grad_err_sup = 0.0;
  double master_err_sup = 0.0;
  double worker_err_sup = 0.0;
  SlotDiagnostics diag;
};

struct RunTrace {
  std::string label;
  HiocoParams params;
  DelayConfig delays;
  EngineMode mode = EngineMode::ZeroLocalDelay;
  std::vector<SlotRecord> slots;
  bool error_measures_filled = false;

  std::size_t horizon() const { return slots.size(); }
  /// Number of warm-up slots before the protocol starts (tau_r or tau).
  std::size_t warmup_slots() const;
};

}  // namespace hioco
