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

// Hierarchical online gradient descent over a master-worker network.
//
// Every slot t > tau_r the master runs J_r Jacobi-style projected gradient
// steps on delayed, recovered data starting from the workers' decisions of
// slot t - tau_r, and sends each worker its intermediate block together with
// the global information evaluated at the other blocks. The worker then runs
// J_l projected steps with its fresh local data while holding that global
// information fixed, executes the result and uploads it with its compressed
// data. In local-delay mode the worker only sees data of slot t - tau_l and
// the master works with slot t - tau.

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hioco/cost_library.hpp"
#include "hioco/delay_network.hpp"
#include "hioco/trace.hpp"

namespace hioco {

/// Checks J_l, J_r >= 0, J_l + J_r >= 1, alpha > 0 and the compression scheme.
void validate(const HiocoParams& params);

/// Seed-deterministic random feasible block used for t <= tau_r (or tau).
/// Balls are sampled uniformly by volume, boxes per coordinate.
DecisionBlock warmup_decision(const FeasibleSet& set, WorkerId c, std::size_t t, const HiocoParams& params);

/// Delay after which the protocol starts in the given mode.
std::size_t protocol_delay(const DelayConfig& delays, EngineMode mode);

class MasterNode {
 public:
  MasterNode(std::shared_ptr<const CostModel> model, FeasibleSet feasible, HiocoParams params,
             DelayConfig delays, EngineMode mode);

  /// Stores decisions and recovered data from delivered uplinks.
  void ingest(std::span<const UplinkPayload> delivered);

  /// Ingests `delivered`, then runs the master's steps for worker slot t and
  /// returns one downlink per worker. Throws ProtocolError when a worker's
  /// decision or data for slot t - tau_r (t - tau) is missing.
  std::vector<DownlinkPayload> master_slot(std::size_t t, std::span<const UplinkPayload> delivered = {});

  /// Iterates x_hat^{0..J_r} of the last master_slot call.
  const std::vector<GlobalDecision>& last_iterates() const { return iterates_; }
  /// Recovered data used in the last master_slot call.
  const std::vector<LocalData>& last_estimates() const { return estimates_; }

 private:
  struct WorkerHistory {
    std::map<std::size_t, DecisionBlock> decisions;  // by decision slot
    std::map<std::size_t, LocalData> data;           // recovered, by data slot
  };

  std::shared_ptr<const CostModel> model_;
  FeasibleSet feasible_;
  HiocoParams params_;
  DelayConfig delays_;
  EngineMode mode_;
  std::vector<WorkerHistory> history_;
  std::vector<GlobalDecision> iterates_;
  std::vector<LocalData> estimates_;
};

/// Read access to a worker's own data stream, delayed by tau_l. This is the
/// worker's only route to data.
class LocalSensor {
 public:
  LocalSensor(const CostScenario& scenario, WorkerId c, std::size_t tau_l)
      : scenario_(&scenario), worker_(c), tau_l_(tau_l) {}

  /// Data available at slot t, i.e. d_{t - tau_l}; nullptr while t <= tau_l.
  const LocalData* acquire(std::size_t t) const;
  std::size_t data_slot(std::size_t t) const { return t > tau_l_ ? t - tau_l_ : 0; }

 private:
  const CostScenario* scenario_;
  WorkerId worker_;
  std::size_t tau_l_;
};

class WorkerNode {
 public:
  WorkerNode(WorkerId id, std::shared_ptr<const CostModel> model, FeasibleSet feasible, LocalSensor sensor,
             HiocoParams params, DelayConfig delays, EngineMode mode);

  struct SlotOutput {
    DecisionBlock executed;
    UplinkPayload uplink;
  };

  WorkerId id() const { return id_; }

  /// Warm-up slot: plays a random feasible decision and uploads it.
  SlotOutput warmup_slot(std::size_t t) const;

  /// Protocol slot: picks the downlink addressed to (this worker, t), runs
  /// J_l steps with the frozen global information and executes the result.
  SlotOutput worker_slot(std::size_t t, std::span<const DownlinkPayload> delivered);

  /// Iterates x_tilde^{0..J_l} and the global information of the last
  /// worker_slot call.
  const std::vector<DecisionBlock>& last_iterates() const { return iterates_; }
  const Vec& last_ginfo() const { return ginfo_; }

 private:
  UplinkPayload make_uplink(std::size_t t, const DecisionBlock& x) const;

  WorkerId id_;
  std::shared_ptr<const CostModel> model_;
  FeasibleSet feasible_;
  LocalSensor sensor_;
  HiocoParams params_;
  DelayConfig delays_;
  EngineMode mode_;
  std::vector<DecisionBlock> iterates_;
  Vec ginfo_;
};

struct EpisodeOptions {
  /// Record master outputs and realized estimation errors per slot.
  bool diagnostics = true;
  std::string label;
};

/// Runs t = 1..T. Requires alpha >= L of the scenario, and tau_l = 0 in
/// zero-local-delay mode.
RunTrace run_episode(const CostScenario& scenario, const HiocoParams& params, const DelayConfig& delays,
                     EngineMode mode, const EpisodeOptions& options = {});

}  // namespace hioco
