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

#include "hioco/delay_network.hpp"

#include <algorithm>

#include "hioco/errors.hpp"

namespace hioco {

void DelayConfig::validate() const {
  if (round_trip() < 1) throw ParameterError("round-trip delay tau_u + tau_d must be at least one slot");
}

void Link::send(std::size_t t, Payload payload) {
  if (t < 1) throw ContractError("slots start at 1");
  queue_.push_back(Envelope{t, t + delay_, std::move(payload)});
  schedule_.emplace_back(t, t + delay_);
  ++sent_;
}

std::vector<Payload> Link::deliver(std::size_t t) {
  if (t < 1) throw ContractError("slots start at 1");
  std::vector<Payload> out;
  auto due = std::stable_partition(queue_.begin(), queue_.end(),
                                   [t](const Envelope& e) { return e.deliver_slot == t; });
  out.reserve(static_cast<std::size_t>(due - queue_.begin()));
  for (auto it = queue_.begin(); it != due; ++it) out.push_back(std::move(it->payload));
  queue_.erase(queue_.begin(), due);
  delivered_ += out.size();
  return out;
}

}  // namespace hioco
