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
#include <sstream>

#include "hioco/engine.hpp"
#include "hioco/errors.hpp"
#include "hioco/metrics.hpp"
#include "oracles.hpp"

using namespace hioco;

namespace {

RunTrace hand_trace(const std::vector<double>& cost, const std::vector<double>& opt, double hop) {
  RunTrace tr;
  for (std::size_t i = 0; i < cost.size(); ++i) {
    SlotRecord s;
    s.t = i + 1;
    s.cost = cost[i];
    s.opt_cost = opt[i];
    Vec o = Vec::Zero(2);
    o(0) = hop * static_cast<double>(i);
    s.optimum = GlobalDecision({o});
    s.executed = GlobalDecision({Vec::Constant(2, 1.0)});
    s.grad_err_sup = 0.5 * static_cast<double>(i);
    tr.slots.push_back(s);
  }
  return tr;
}

HiocoParams params_for(const CostScenario& s, int jl, int jr, CompressionScheme comp = IdentityScheme{}) {
  HiocoParams p;
  p.alpha = s.constants().L;
  p.J_l = jl;
  p.J_r = jr;
  p.compression = comp;
  return p;
}

}  // namespace

TEST_CASE("regret of a two-slot trace") {
  const auto tr = hand_trace({3.0, 2.0}, {2.5, 1.5}, 0.0);
  CHECK(dynamic_regret(tr) == doctest::Approx(1.0));
}

TEST_CASE("path lengths of optima hopping by a fixed distance") {
  const double delta = 0.3;
  const std::size_t T = 9;
  const auto tr = hand_trace(std::vector<double>(T, 1.0), std::vector<double>(T, 0.0), delta);
  CHECK(path_length(tr) == doctest::Approx((T - 1) * delta));
  CHECK(squared_path_length(tr) == doctest::Approx((T - 1) * delta * delta));
  CHECK(dynamic_regret(tr) == doctest::Approx(double(T)));
}

TEST_CASE("path length and squared path length satisfy Cauchy-Schwarz on real runs") {
  const auto s = CostScenario::generate(oracle::small_spec(3, 80, DriftKind::DecayingWalk, 1.0));
  const auto tr = run_episode(s, params_for(s, 1, 1), DelayConfig{}, EngineMode::ZeroLocalDelay);
  const double pi = path_length(tr);
  CHECK(pi > 0.0);
  CHECK(pi * pi <= double(tr.horizon()) * squared_path_length(tr) * (1 + 1e-12));
}

TEST_CASE("incomplete traces are rejected") {
  RunTrace empty;
  CHECK_THROWS_AS(dynamic_regret(empty), ContractError);
  auto tr = hand_trace({1.0, 1.0}, {0.0, 0.0}, 0.1);
  tr.slots[1].t = 5;
  CHECK_THROWS_AS(path_length(tr), ContractError);
}

TEST_CASE("gradient error is exactly zero for static data without compression") {
  const auto s = CostScenario::generate(oracle::small_spec(4, 30, DriftKind::Static));
  auto tr = run_episode(s, params_for(s, 1, 2), DelayConfig{2, 0, 0}, EngineMode::ZeroLocalDelay);
  const auto m = gradient_error_measures(s, tr);
  CHECK(m.delta == 0.0);
  CHECK(m.delta2 == 0.0);
  CHECK(tr.error_measures_filled);
}

TEST_CASE("quantization on static data gives a constant positive error per protocol slot") {
  const auto s = CostScenario::generate(oracle::small_spec(4, 30, DriftKind::Static));
  auto tr = run_episode(s, params_for(s, 1, 1, QuantizeScheme{4, -3.0, 3.0}), DelayConfig{1, 1, 0},
                        EngineMode::ZeroLocalDelay);
  gradient_error_measures(s, tr);
  const double first = tr.slots[2].grad_err_sup;
  CHECK(first > 0.0);
  for (const auto& slot : tr.slots) {
    if (slot.warmup)
      CHECK(slot.grad_err_sup == 0.0);
    else
      CHECK(slot.grad_err_sup == doctest::Approx(first).epsilon(1e-12));
  }
}

TEST_CASE("closed-form error suprema dominate sampled errors and are attained when only targets drift") {
  // With identity compression only b drifts, so every estimator error is a
  // constant vector over X and sampling must reach the closed form.
  const auto s = CostScenario::generate(oracle::small_spec(12, 20, DriftKind::RandomWalk));
  struct Case {
    DelayConfig d;
    EngineMode mode;
  };
  std::mt19937_64 rng(3);
  for (const Case& c : {Case{{2, 0, 0}, EngineMode::ZeroLocalDelay}, Case{{1, 0, 2}, EngineMode::LocalDelay}}) {
    const auto p = params_for(s, 1, 1);
    const std::size_t lag = protocol_delay(c.d, c.mode);
    for (std::size_t t = lag + 1; t <= s.horizon(); t += 3) {
      const auto sup = estimator_error_sup(s, p, c.d, c.mode, t);
      const std::size_t source = t - lag;
      const std::size_t own = t - c.d.tau_l;
      double master = 0.0, worker = 0.0;
      for (int k = 0; k < 200; ++k) {
        const auto x = oracle::sample_point(s.feasible(), rng);
        const Vec master_grad = s.gradient(source, x).flat();
        std::vector<Vec> wblocks;
        for (std::size_t w = 0; w < s.workers(); ++w) {
          const WorkerId id{w};
          // Own data of slot `own`, other workers' data of slot `source`.
          wblocks.push_back(s.local_gradient(own, id, x.block(id), s.global_info(source, id, x)));
        }
        const Vec worker_grad = GlobalDecision(wblocks).flat();
        for (std::size_t ref : {t, source}) master = std::max(master, (master_grad - s.gradient(ref, x).flat()).norm());
        for (std::size_t ref : {t, own}) worker = std::max(worker, (worker_grad - s.gradient(ref, x).flat()).norm());
      }
      CHECK(master <= sup.master * (1 + 1e-9) + 1e-12);
      CHECK(worker <= sup.worker * (1 + 1e-9) + 1e-12);
      CHECK(master == doctest::Approx(sup.master).epsilon(1e-9));
      CHECK(worker == doctest::Approx(sup.worker).epsilon(1e-9));
    }
  }
}

TEST_CASE("estimator error is zero during warm-up and range checked") {
  const auto s = CostScenario::generate(oracle::small_spec(1, 10));
  const auto p = params_for(s, 1, 1);
  CHECK(estimator_error_sup(s, p, DelayConfig{3, 0, 0}, EngineMode::ZeroLocalDelay, 3).value() == 0.0);
  CHECK(estimator_error_sup(s, p, DelayConfig{3, 0, 0}, EngineMode::ZeroLocalDelay, 4).value() > 0.0);
  CHECK_THROWS_AS(estimator_error_sup(s, p, DelayConfig{}, EngineMode::ZeroLocalDelay, 11), SlotRangeError);
}

TEST_CASE("optimum gradient energy vanishes for interior optima") {
  const auto s = CostScenario::generate(oracle::small_spec(2, 10, DriftKind::RandomWalk, 100.0));
  CHECK(optimum_gradient_energy(s) < 1e-16);
  const auto tight = CostScenario::generate(oracle::small_spec(2, 10, DriftKind::RandomWalk, 0.05));
  CHECK(optimum_gradient_energy(tight) > 1e-3);
}

TEST_CASE("trace CSV has the documented header and cumulative columns") {
  const auto tr = hand_trace({3.0, 2.0, 4.0}, {2.5, 1.5, 1.0}, 2.0);
  std::ostringstream os;
  write_trace_csv(os, tr, "note");
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# note");
  std::getline(in, line);
  CHECK(line == "t,cost,opt_cost,regret_cum,path_cum,path2_cum,delta_cum,delta2_cum,track_err");
  CHECK(std::string(kTraceCsvHeader) == line);

  const auto rows = trace_rows(tr);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].regret_cum == doctest::Approx(4.0));
  CHECK(rows[2].path_cum == doctest::Approx(4.0));
  CHECK(rows[2].path2_cum == doctest::Approx(8.0));
  CHECK(rows[2].delta_cum == doctest::Approx(1.5));
  CHECK(rows[2].delta2_cum == doctest::Approx(1.25));
  CHECK(rows[0].track_err == doctest::Approx(std::sqrt(2.0)));

  int data_lines = 0;
  while (std::getline(in, line)) ++data_lines;
  CHECK(data_lines == 3);
  CHECK(format_double(0.1) == "0.10000000000000001");
}
