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


#include <doctest.h>

#include "hioco/delay_network.hpp"
#include "hioco/errors.hpp"

using namespace hioco;

namespace {

Payload uplink(std::size_t worker, std::size_t slot) {
  return UplinkPayload{WorkerId{worker}, slot, Vec::Constant(1, double(slot)), std::nullopt};
}

}  // namespace

TEST_CASE("messages arrive exactly delay slots after sending") {
  Link link(3);
  for (std::size_t t = 1; t <= 10; ++t) {
    link.send(t, uplink(0, t));
    const auto got = link.deliver(t);
    if (t <= 3) {
      CHECK(got.empty());
    } else {
      REQUIRE(got.size() == 1);
      CHECK(std::get<UplinkPayload>(got[0]).decision_slot == t - 3);
    }
  }
  CHECK(link.in_flight() == 3);
  CHECK(link.sent() == 10);
  CHECK(link.delivered() == 7);
  for (const auto& [sent, due] : link.schedule()) CHECK(due == sent + 3);
}

TEST_CASE("a zero-delay link delivers in the same slot, in send order") {
  Link link(0);
  link.send(4, uplink(2, 4));
  link.send(4, uplink(0, 4));
  link.send(4, uplink(1, 4));
  const auto got = link.deliver(4);
  REQUIRE(got.size() == 3);
  CHECK(std::get<UplinkPayload>(got[0]).worker.index == 2);
  CHECK(std::get<UplinkPayload>(got[1]).worker.index == 0);
  CHECK(std::get<UplinkPayload>(got[2]).worker.index == 1);
  CHECK(link.deliver(4).empty());
}

TEST_CASE("delivery only releases messages due at that slot") {
  Link link(2);
  link.send(1, uplink(0, 1));
  link.send(2, uplink(0, 2));
  CHECK(link.deliver(2).empty());
  CHECK(link.deliver(3).size() == 1);
  CHECK(link.deliver(5).empty());
  CHECK(link.in_flight() == 1);
}

TEST_CASE("slot numbering starts at one") {
  Link link(1);
  CHECK_THROWS_AS(link.send(0, uplink(0, 0)), ContractError);
  CHECK_THROWS_AS(link.deliver(0), ContractError);
}

TEST_CASE("network wires uplink and downlink delays") {
  const DelayConfig d{2, 1, 4};
  CHECK(d.round_trip() == 3);
  CHECK(d.total() == 7);
  const Network net(d);
  CHECK(net.uplink.delay() == 2);
  CHECK(net.downlink.delay() == 1);
  CHECK_THROWS_AS((DelayConfig{0, 0, 0}.validate()), ParameterError);
  CHECK_NOTHROW((DelayConfig{0, 1, 0}.validate()));
}
