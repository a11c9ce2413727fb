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

// Time-slotted message fabric with constant per-link delays.

#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "hioco/compression.hpp"
#include "hioco/core_model.hpp"

namespace hioco {

/// Uplink, downlink and local-acquisition delays in slots.
struct DelayConfig {
  std::size_t tau_u = 1;
  std::size_t tau_d = 0;
  std::size_t tau_l = 0;

  std::size_t round_trip() const { return tau_u + tau_d; }
  std::size_t total() const { return tau_l + round_trip(); }
  /// Throws ParameterError unless the round trip is at least one slot.
  void validate() const;
};

/// Worker -> master: executed decision plus compressed local data.
struct UplinkPayload {
  WorkerId worker;
  std::size_t decision_slot = 0;
  DecisionBlock decision;
  /// Absent while the worker has not acquired any data yet (t <= tau_l).
  std::optional<CompressedData> compressed;
};

/// Master -> worker: intermediate decision and frozen global information for
/// the worker's slot `target_slot`.
struct DownlinkPayload {
  WorkerId worker;
  std::size_t target_slot = 0;
  std::size_t data_slot = 0;  // slot of the data the master used
  DecisionBlock intermediate;
  Vec ginfo;
};

using Payload = std::variant<UplinkPayload, DownlinkPayload>;

struct Envelope {
  std::size_t send_slot = 0;
  std::size_t deliver_slot = 0;
  Payload payload;
};

/// FIFO link with a fixed delay. Not thread-safe.
class Link {
 public:
  explicit Link(std::size_t delay) : delay_(delay) {}

  std::size_t delay() const { return delay_; }

  /// Enqueues with deliver_slot = t + delay.
  void send(std::size_t t, Payload payload);

  /// Removes and returns every envelope due at exactly slot t, in send order.
  std::vector<Payload> deliver(std::size_t t);

  std::size_t in_flight() const { return queue_.size(); }
  std::size_t sent() const { return sent_; }
  std::size_t delivered() const { return delivered_; }
  /// Every (send_slot, deliver_slot) pair seen so far, in send order.
  const std::vector<std::pair<std::size_t, std::size_t>>& schedule() const { return schedule_; }

 private:
  std::size_t delay_;
  std::vector<Envelope> queue_;
  std::size_t sent_ = 0;
  std::size_t delivered_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> schedule_;
};

/// One shared uplink (all workers to master) and one shared downlink.
struct Network {
  explicit Network(const DelayConfig& config) : uplink(config.tau_u), downlink(config.tau_d) {}
  Link uplink;
  Link downlink;
};

}  // namespace hioco
