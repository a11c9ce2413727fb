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

#include "hioco/bounds.hpp"
#include "hioco/engine.hpp"
#include "hioco/errors.hpp"
#include "oracles.hpp"

using namespace hioco;

namespace {

HiocoParams params_for(const CostScenario& s, int jl, int jr, CompressionScheme comp = IdentityScheme{}) {
  HiocoParams p;
  p.alpha = s.constants().L;
  p.J_l = jl;
  p.J_r = jr;
  p.compression = comp;
  p.init_seed = 5;
  return p;
}

}  // namespace

TEST_CASE("executed decisions are feasible and warm-up length follows the delays") {
  const auto s = CostScenario::generate(oracle::small_spec(1, 40, DriftKind::RandomWalk, 0.5));
  struct Case {
    DelayConfig d;
    EngineMode mode;
    std::size_t warm;
  };
  for (const Case& c : {Case{{1, 0, 0}, EngineMode::ZeroLocalDelay, 1}, Case{{2, 1, 0}, EngineMode::ZeroLocalDelay, 3},
                        Case{{1, 1, 2}, EngineMode::LocalDelay, 4}, Case{{0, 1, 1}, EngineMode::LocalDelay, 2}}) {
    const auto trace = run_episode(s, params_for(s, 2, 1, QuantizeScheme{6, -2.0, 2.0}), c.d, c.mode);
    REQUIRE(trace.horizon() == 40);
    CHECK(trace.warmup_slots() == c.warm);
    for (const auto& slot : trace.slots) {
      CHECK(s.feasible().contains(slot.executed, 1e-12));
      CHECK(slot.warmup == (slot.t <= c.warm));
      CHECK(slot.cost == doctest::Approx(s.eval_cost(slot.t, slot.executed)));
      CHECK(slot.cost >= slot.opt_cost - 1e-9);
    }
  }
}

TEST_CASE("episodes are deterministic") {
  const auto s = CostScenario::generate(oracle::small_spec(2, 30));
  const auto p = params_for(s, 1, 2, NoiseScheme{0.05, 3});
  const auto a = run_episode(s, p, DelayConfig{1, 1, 0}, EngineMode::ZeroLocalDelay);
  const auto b = run_episode(s, p, DelayConfig{1, 1, 0}, EngineMode::ZeroLocalDelay);
  for (std::size_t i = 0; i < a.horizon(); ++i) CHECK(a.slots[i].executed.flat() == b.slots[i].executed.flat());
  auto q = p;
  q.init_seed = 6;
  const auto c = run_episode(s, q, DelayConfig{1, 1, 0}, EngineMode::ZeroLocalDelay);
  CHECK(c.slots[0].executed.flat() != a.slots[0].executed.flat());
}

TEST_CASE("warm-up decisions are seeded and feasible") {
  const FeasibleSet set({Ball{Vec::Zero(3), 2.0}, Box{Vec::Constant(2, -1.0), Vec::Constant(2, 0.0)}});
  HiocoParams p;
  p.init_seed = 9;
  for (std::size_t t = 1; t < 20; ++t)
    for (std::size_t c = 0; c < 2; ++c) {
      const Vec v = warmup_decision(set, WorkerId{c}, t, p);
      CHECK(set.contains(WorkerId{c}, v));
      CHECK(v == warmup_decision(set, WorkerId{c}, t, p));
    }
}

TEST_CASE("invalid runs are rejected before any slot executes") {
  const auto s = CostScenario::generate(oracle::small_spec(3, 5));
  auto p = params_for(s, 1, 1);
  CHECK_THROWS_AS(run_episode(s, p, DelayConfig{1, 0, 2}, EngineMode::ZeroLocalDelay), ParameterError);
  CHECK_THROWS_AS(run_episode(s, p, DelayConfig{0, 0, 0}, EngineMode::ZeroLocalDelay), ParameterError);
  p.alpha = 0.9 * s.constants().L;
  CHECK_THROWS_AS(run_episode(s, p, DelayConfig{}, EngineMode::ZeroLocalDelay), ParameterError);
  p = params_for(s, 0, 0);
  CHECK_THROWS_AS(run_episode(s, p, DelayConfig{}, EngineMode::ZeroLocalDelay), ParameterError);
  p = params_for(s, -1, 2);
  CHECK_THROWS_AS(validate(p), ParameterError);
}

TEST_CASE("nodes refuse to act without the messages they need") {
  const auto s = CostScenario::generate(oracle::small_spec(4, 5));
  const auto p = params_for(s, 1, 1);
  auto model = std::shared_ptr<const CostModel>(&s.model(), [](const CostModel*) {});
  MasterNode master(model, s.feasible(), p, DelayConfig{}, EngineMode::ZeroLocalDelay);
  CHECK_THROWS_AS(master.master_slot(1), ProtocolError);
  CHECK_THROWS_AS(master.master_slot(2), ProtocolError);

  WorkerNode worker(WorkerId{0}, model, s.feasible(), LocalSensor(s, WorkerId{0}, 0), p, DelayConfig{},
                    EngineMode::ZeroLocalDelay);
  CHECK_THROWS_AS(worker.worker_slot(2, {}), ProtocolError);

  const LocalSensor sensor(s, WorkerId{1}, 2);
  CHECK(sensor.acquire(2) == nullptr);
  REQUIRE(sensor.acquire(3) != nullptr);
  CHECK(sensor.acquire(3)->b == s.data(1, WorkerId{1}).b);
  CHECK(sensor.data_slot(5) == 3);
}

TEST_CASE("per-slot contraction holds along recorded runs") {
  const auto s = CostScenario::generate(oracle::small_spec(6, 60, DriftKind::RandomWalk, 1.0));
  for (auto comp : {CompressionScheme{IdentityScheme{}}, CompressionScheme{QuantizeScheme{5, -2.0, 2.0}},
                    CompressionScheme{NoiseScheme{0.05, 1}}})
    for (auto [jl, jr] : {std::pair{1, 1}, std::pair{0, 3}, std::pair{3, 0}, std::pair{2, 2}}) {
      const auto zl = run_episode(s, params_for(s, jl, jr, comp), DelayConfig{1, 1, 0}, EngineMode::ZeroLocalDelay);
      CHECK(per_slot_contraction_slack(s, zl, 0.0) >= -1e-9);
      const auto ld = run_episode(s, params_for(s, jl, jr, comp), DelayConfig{1, 0, 2}, EngineMode::LocalDelay);
      CHECK(per_slot_contraction_slack(s, ld, 0.0) >= -1e-9);
    }
}

TEST_CASE("with one worker the protocol is centralized delayed multi-step descent") {
  ScenarioSpec spec;
  spec.dims = {3};
  spec.m = 4;
  spec.horizon = 50;
  spec.mu = 0.5;
  spec.seed = 19;
  spec.drift = DriftModel{DriftKind::RandomWalk, 0.3, 0.0, 4};
  spec.feasible = {Ball{Vec::Zero(3), 0.6}};
  const auto s = CostScenario::generate(spec);
  std::vector<LocalData> data;
  for (std::size_t t = 1; t <= s.horizon(); ++t) data.push_back(s.data(t, WorkerId{0}));

  struct Case {
    DelayConfig d;
    EngineMode mode;
    int jl, jr;
  };
  for (const Case& c : {Case{{1, 0, 0}, EngineMode::ZeroLocalDelay, 2, 2}, Case{{2, 1, 0}, EngineMode::ZeroLocalDelay, 1, 3},
                        Case{{1, 0, 2}, EngineMode::LocalDelay, 3, 1}, Case{{1, 1, 1}, EngineMode::LocalDelay, 0, 2}}) {
    const auto trace = run_episode(s, params_for(s, c.jl, c.jr), c.d, c.mode);
    const std::size_t tau = trace.warmup_slots();
    std::vector<Vec> warm;
    for (std::size_t t = 1; t <= tau; ++t) warm.push_back(trace.slots[t - 1].executed.flat());
    const auto ref = oracle::centralized_reference(data, spec.mu, s.constants().L, 0.6, tau,
                                                   c.mode == EngineMode::LocalDelay ? c.d.tau_l : 0, c.jl, c.jr, warm);
    double worst = 0.0;
    for (std::size_t t = 1; t <= s.horizon(); ++t)
      worst = std::max(worst, (trace.slots[t - 1].executed.flat() - ref[t - 1]).norm());
    CHECK(worst < 1e-10);
  }
}
