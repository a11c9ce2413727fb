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

#include <random>

#include "hioco/cost_library.hpp"
#include "hioco/errors.hpp"
#include "oracles.hpp"

using namespace hioco;

namespace {

std::vector<Vec> split(const Vec& flat, const std::vector<std::size_t>& dims) {
  return GlobalDecision::from_flat(flat, dims).blocks();
}

}  // namespace

TEST_CASE("cost matches a loop-based evaluation and its gradient matches finite differences") {
  const auto scenario = CostScenario::generate(oracle::small_spec(5, 10));
  const auto dims = scenario.dims();
  std::mt19937_64 rng(1);
  for (std::size_t t : {std::size_t{1}, std::size_t{4}, std::size_t{10}}) {
    const auto view = scenario.data(t);
    const std::vector<LocalData> data(view.begin(), view.end());
    const auto x = oracle::sample_point(scenario.feasible(), rng);
    CHECK(scenario.eval_cost(t, x) == doctest::Approx(oracle::naive_cost(data, x.blocks(), scenario.mu())).epsilon(1e-12));
    const Vec fd = oracle::finite_difference(
        [&](const Vec& z) { return oracle::naive_cost(data, split(z, dims), scenario.mu()); }, x.flat());
    CHECK((scenario.gradient(t, x).flat() - fd).norm() < 1e-6);
  }
}

TEST_CASE("local gradient with global information reproduces each gradient block") {
  const auto scenario = CostScenario::generate(oracle::small_spec(8, 3));
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = oracle::sample_point(scenario.feasible(), rng);
    const auto full = scenario.gradient(2, x);
    for (std::size_t c = 0; c < scenario.workers(); ++c) {
      const WorkerId id{c};
      const Vec g = scenario.global_info(2, id, x);
      const Vec h = scenario.local_gradient(2, id, x.block(id), g);
      CHECK((h - full.block(id)).norm() < 1e-12);
    }
  }
}

TEST_CASE("global information ignores the worker's own block") {
  const auto scenario = CostScenario::generate(oracle::small_spec(8, 1));
  std::mt19937_64 rng(4);
  auto x = oracle::sample_point(scenario.feasible(), rng);
  const Vec before = scenario.global_info(1, WorkerId{1}, x);
  x.block(WorkerId{1}).setConstant(0.3);
  CHECK((scenario.global_info(1, WorkerId{1}, x) - before).norm() == 0.0);
}

TEST_CASE("smoothness equals the top Hessian eigenvalue and mu is the bottom one") {
  const auto scenario = CostScenario::generate(oracle::small_spec(13, 20));
  double L = 0.0;
  for (std::size_t t = 1; t <= scenario.horizon(); ++t) {
    const Mat H = scenario.model().hessian(scenario.data(t));
    const double top = oracle::max_eigenvalue(H);
    CHECK(scenario.constants().slot_smoothness[t - 1] == doctest::Approx(top).epsilon(1e-8));
    CHECK(oracle::min_eigenvalue(H) >= scenario.mu() - 1e-10);
    L = std::max(L, top);
  }
  CHECK(scenario.constants().L == doctest::Approx(L).epsilon(1e-8));
}

TEST_CASE("gradient bound D dominates sampled gradient norms") {
  const auto scenario = CostScenario::generate(oracle::small_spec(21, 15));
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (std::size_t t = 1; t <= scenario.horizon(); ++t)
    for (int k = 0; k < 200; ++k) worst = std::max(worst, scenario.gradient(t, oracle::sample_point(scenario.feasible(), rng)).flat().norm());
  CHECK(worst <= scenario.constants().D);
  CHECK(scenario.constants().R == doctest::Approx(scenario.feasible().diameter()));
}

TEST_CASE("per-slot optimum satisfies the optimality condition") {
  // Small balls force active constraints.
  for (double radius : {0.2, 5.0}) {
    const auto scenario = CostScenario::generate(oracle::small_spec(3, 6, DriftKind::RandomWalk, radius));
    std::mt19937_64 rng(5);
    for (std::size_t t = 1; t <= scenario.horizon(); ++t) {
      const auto& opt = scenario.per_slot_optimum(t);
      CHECK(scenario.feasible().contains(opt.x, 1e-9));
      const Vec g = scenario.gradient(t, opt.x).flat();
      for (int k = 0; k < 100; ++k) {
        const auto z = oracle::sample_point(scenario.feasible(), rng);
        CHECK(g.dot(z.flat() - opt.x.flat()) >= -1e-7);
      }
      CHECK(opt.cost == doctest::Approx(scenario.eval_cost(t, opt.x)));
    }
  }
}

TEST_CASE("closed-form and iterative minimizers agree") {
  const auto scenario = CostScenario::generate(oracle::small_spec(17, 2, DriftKind::Static, 50.0));
  const auto closed = minimize_coupled(scenario.model(), scenario.data(1), scenario.feasible());
  const auto iter = minimize_coupled_iterative(scenario.model(), scenario.data(1), scenario.feasible());
  CHECK(closed.interior);
  CHECK(distance(closed.x, iter.x) < 1e-8);
}

TEST_CASE("generation is deterministic in the seed") {
  const auto a = CostScenario::generate(oracle::small_spec(31, 5));
  const auto b = CostScenario::generate(oracle::small_spec(31, 5));
  const auto c = CostScenario::generate(oracle::small_spec(32, 5));
  for (std::size_t t = 1; t <= 5; ++t)
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(a.data(t, WorkerId{k}).A == b.data(t, WorkerId{k}).A);
      CHECK(a.data(t, WorkerId{k}).b == b.data(t, WorkerId{k}).b);
    }
  CHECK(a.data(1, WorkerId{0}).A != c.data(1, WorkerId{0}).A);
}

TEST_CASE("data matrices respect a_max") {
  auto spec = oracle::small_spec(2, 1);
  spec.a_max = 0.7;
  const auto s = CostScenario::generate(spec);
  for (std::size_t c = 0; c < s.workers(); ++c) {
    const Mat& A = s.data(1, WorkerId{c}).A;
    CHECK(std::sqrt(oracle::max_eigenvalue(A.transpose() * A)) <= 0.7 + 1e-9);
  }
}

TEST_CASE("drift moves the aggregate target by the prescribed step") {
  auto total = [](const CostScenario& s, std::size_t t) {
    Vec b = Vec::Zero(static_cast<Eigen::Index>(s.info_dim()));
    for (const auto& d : s.data(t)) b += d.b;
    return b;
  };
  SUBCASE("random walk") {
    const auto s = CostScenario::generate(oracle::small_spec(6, 12, DriftKind::RandomWalk));
    for (std::size_t t = 2; t <= 12; ++t) CHECK((total(s, t) - total(s, t - 1)).norm() == doctest::Approx(0.2));
  }
  SUBCASE("decaying walk") {
    auto spec = oracle::small_spec(6, 12, DriftKind::DecayingWalk);
    const auto s = CostScenario::generate(spec);
    for (std::size_t t = 2; t <= 12; ++t)
      CHECK((total(s, t) - total(s, t - 1)).norm() == doctest::Approx(0.2 * std::pow(double(t), -0.5)));
  }
  SUBCASE("static") {
    const auto s = CostScenario::generate(oracle::small_spec(6, 12, DriftKind::Static));
    for (std::size_t t = 2; t <= 12; ++t) CHECK((total(s, t) - total(s, 1)).norm() == 0.0);
  }
  SUBCASE("matrices never drift") {
    const auto s = CostScenario::generate(oracle::small_spec(6, 12, DriftKind::RandomWalk));
    CHECK(s.data(12, WorkerId{1}).A == s.data(1, WorkerId{1}).A);
  }
}

TEST_CASE("slot access is range checked") {
  const auto s = CostScenario::generate(oracle::small_spec(1, 4));
  CHECK_THROWS_AS(s.data(0), SlotRangeError);
  CHECK_THROWS_AS(s.data(5), SlotRangeError);
  CHECK_THROWS_AS(s.per_slot_optimum(5), SlotRangeError);
  CHECK_NOTHROW(s.data(4));
}

TEST_CASE("scenario specs round-trip through JSON") {
  auto spec = oracle::small_spec(77, 9, DriftKind::DecayingWalk);
  spec.feasible[1] = Box{Vec::Constant(3, -1.0), Vec::Constant(3, 2.0)};
  const nlohmann::json j = spec;
  const auto back = j.get<ScenarioSpec>();
  CHECK(back.dims == spec.dims);
  CHECK(back.horizon == 9);
  CHECK(back.drift.kind == DriftKind::DecayingWalk);
  CHECK(back.drift.rho == 0.5);
  CHECK(std::get<Box>(back.feasible[1]).upper == std::get<Box>(spec.feasible[1]).upper);
  CHECK(nlohmann::json(back) == j);
}

TEST_CASE("invalid specs are rejected") {
  auto spec = oracle::small_spec(1, 4);
  spec.mu = 0.0;
  CHECK_THROWS_AS(spec.validate(), ParameterError);
  spec = oracle::small_spec(1, 4);
  spec.feasible.pop_back();
  CHECK_THROWS_AS(spec.validate(), ParameterError);
  CHECK_THROWS_AS(drift_kind_from_string("sideways"), ParameterError);
}
