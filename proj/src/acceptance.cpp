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

#include "hioco/acceptance.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "hioco/bounds.hpp"
#include "hioco/config.hpp"
#include "hioco/engine.hpp"
#include "hioco/errors.hpp"
#include "hioco/metrics.hpp"
#include "hioco/rng.hpp"

namespace hioco::acceptance {

namespace {

// Values recorded on the first build for preset "thm1", seed 42, warm-up
// stream of sweep point 0.
constexpr double kPinnedRegretJ22 = 13.048763503674328;
constexpr double kPinnedRegretJ10 = 15.037940226192575;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

Vec sample_block(const SetDescriptor& d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  if (const auto* b = std::get_if<Ball>(&d)) {
    Vec dir(b->center.size());
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = normal(rng);
    const double r = b->radius * std::pow(unit(rng), 1.0 / static_cast<double>(dir.size()));
    return b->center + r * dir / dir.norm();
  }
  const auto& x = std::get<Box>(d);
  Vec v(x.lower.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = x.lower(i) + unit(rng) * (x.upper(i) - x.lower(i));
  return v;
}

GlobalDecision sample_point(const FeasibleSet& set, std::mt19937_64& rng) {
  std::vector<DecisionBlock> blocks;
  for (std::size_t c = 0; c < set.workers(); ++c) blocks.push_back(sample_block(set.part(WorkerId{c}), rng));
  return GlobalDecision(std::move(blocks));
}

const CostScenario& preset_scenario() {
  static const CostScenario s = CostScenario::generate(preset("thm1").scenario);
  return s;
}

const CostScenario& static_scenario() {
  static const CostScenario s = CostScenario::generate(preset("static-sanity").scenario);
  return s;
}

CompressionScheme quantizer() { return QuantizeScheme{8, -4.0, 4.0}; }

HiocoParams params(const CostScenario& s, int jl, int jr, CompressionScheme comp, std::uint64_t seed = 42) {
  HiocoParams p;
  p.alpha = s.constants().L;
  p.J_l = jl;
  p.J_r = jr;
  p.compression = std::move(comp);
  p.init_seed = seed;
  return p;
}

struct BoundRun {
  std::string label;
  RunTrace trace;
  BoundReport report;
};

std::vector<BoundRun> zero_local_runs() {
  const auto& s = preset_scenario();
  std::vector<BoundRun> runs;
  for (std::size_t tau_r : {1u, 3u})
    for (int q = 0; q < 2; ++q) {
      const DelayConfig d{tau_r, 0, 0};
      auto trace = run_episode(s, params(s, 2, 2, q ? quantizer() : IdentityScheme{}), d, EngineMode::ZeroLocalDelay);
      auto report = bound_report(s, trace);
      runs.push_back({"tau_r=" + std::to_string(tau_r) + (q ? " q8" : " id"), std::move(trace), std::move(report)});
    }
  return runs;
}

std::vector<BoundRun> local_delay_runs() {
  const auto& s = preset_scenario();
  std::vector<BoundRun> runs;
  for (int q = 0; q < 2; ++q) {
    const DelayConfig d{1, 0, 2};
    auto trace = run_episode(s, params(s, 3, 3, q ? quantizer() : IdentityScheme{}), d, EngineMode::LocalDelay);
    auto report = bound_report(s, trace);
    runs.push_back({std::string("tau_l=2") + (q ? " q8" : " id"), std::move(trace), std::move(report)});
  }
  return runs;
}

Result finish(int id, std::string name, bool passed, std::string detail, const Timer& timer) {
  return Result{id, std::move(name), passed, std::move(detail), timer.seconds()};
}

}  // namespace

Result contraction_suite() {
  const Timer timer;
  std::mt19937_64 rng(derive_seed({2024, 1}));
  std::uniform_real_distribution<double> unit;
  std::normal_distribution<double> normal;
  int held = 0;
  double worst = std::numeric_limits<double>::infinity();
  const int cases = 1000;
  for (int k = 0; k < cases; ++k) {
    const double mu = 0.5 + 1.5 * unit(rng);
    const double L = mu * (1.0 + 9.0 * unit(rng));
    const double alpha = L * (1.0 + unit(rng));
    const double gamma = mu * (0.5 * static_cast<double>(1 + rng() % 3));

    const int blocks = 1 + static_cast<int>(rng() % 2);
    std::vector<SetDescriptor> parts;
    for (int b = 0; b < blocks; ++b) {
      const auto n = static_cast<Eigen::Index>(1 + rng() % 3);
      if (rng() % 2) {
        Vec center(n);
        for (Eigen::Index i = 0; i < n; ++i) center(i) = normal(rng);
        parts.push_back(Ball{center, 0.5 + 2.0 * unit(rng)});
      } else {
        Vec lo(n), hi(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          lo(i) = normal(rng) - 1.5 * unit(rng) - 0.1;
          hi(i) = lo(i) + 0.2 + 3.0 * unit(rng);
        }
        parts.push_back(Box{lo, hi});
      }
    }
    const FeasibleSet set(parts);
    const auto n = static_cast<Eigen::Index>(set.dimension());

    Mat g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) g(i, j) = normal(rng);
    const Mat q = Eigen::HouseholderQR<Mat>(g).householderQ();
    Vec eig(n);
    for (Eigen::Index i = 0; i < n; ++i) eig(i) = mu + (L - mu) * unit(rng);
    eig(0) = mu;
    if (n > 1) eig(n - 1) = L;
    QuadraticInstance inst{q * eig.asDiagonal() * q.transpose(), Vec(n), set, mu, L};
    for (Eigen::Index i = 0; i < n; ++i) inst.linear(i) = 3.0 * normal(rng);

    const Vec unconstrained = inst.hessian.ldlt().solve(inst.linear);
    GlobalDecision minimizer = GlobalDecision::from_flat(unconstrained, set.dims());
    if (!set.contains(minimizer, 0.0))
      minimizer = minimize_quadratic(inst.hessian, inst.linear, set, mu, L, MinimizeOptions{1e-13, 5000000}).x;

    const GlobalDecision y = sample_point(set, rng);
    Vec err(n);
    for (Eigen::Index i = 0; i < n; ++i) err(i) = normal(rng);
    const double scales[] = {0.0, 1e-3, 0.1, 1.0, 10.0};
    err *= scales[rng() % 5] * unit(rng) / err.norm();

    const auto v = lemma2_check(inst, minimizer, y, gamma, alpha, err);
    worst = std::min(worst, v.slack);
    if (v.slack >= kContractionSlack) ++held;
  }
  const double t = timer.seconds();
  return finish(1, "Contraction suite", held == cases && t < 5.0,
                std::to_string(held) + "/" + std::to_string(cases) + " held, worst slack " + fmt(worst) + ", " +
                    fmt(t, 3) + " s",
                timer);
}

Result zero_local_delay_bounds() {
  const Timer timer;
  std::ostringstream detail;
  bool ok = true;
  int checked = 0;
  for (const auto& r : zero_local_runs()) {
    const auto& rep = r.report;
    double bound = rep.bound_i;
    if (rep.bound_ii.valid()) bound = std::min(bound, *rep.bound_ii.value);
    if (!rep.bound_ii.valid()) {
      detail << r.label << ": 2eta^J=" << fmt(rep.bound_ii.condition) << " not checked; ";
      continue;
    }
    ++checked;
    ok = ok && rep.regret <= bound;
    detail << r.label << ": " << fmt(rep.regret) << " <= " << fmt(bound) << "; ";
  }
  const double t = timer.seconds();
  ok = ok && checked > 0 && t < 30.0;
  detail << fmt(t, 3) << " s";
  return finish(2, "Zero-local-delay bounds", ok, detail.str(), timer);
}

Result local_delay_bound() {
  const Timer timer;
  std::ostringstream detail;
  bool ok = true;
  for (const auto& r : local_delay_runs()) {
    const auto& rep = r.report;
    if (!rep.bound_thm2.valid()) {
      ok = false;
      detail << r.label << ": 4eta^J=" << fmt(rep.bound_thm2.condition) << " violates the step condition; ";
      continue;
    }
    ok = ok && rep.regret <= *rep.bound_thm2.value;
    detail << r.label << ": " << fmt(rep.regret) << " <= " << fmt(*rep.bound_thm2.value) << "; ";
  }
  const double t = timer.seconds();
  ok = ok && t < 15.0;
  detail << fmt(t, 3) << " s";
  return finish(3, "Local-delay bound", ok, detail.str(), timer);
}

Result static_convergence() {
  const Timer timer;
  const auto& s = static_scenario();
  const std::pair<int, int> splits[] = {{1, 0}, {0, 1}, {1, 1}, {2, 2}, {0, 3}};
  // Worst tracking error after tau_r + 50 slots and worst |tail regret|.
  auto measure = [&](std::size_t tau_r) {
    double track = 0.0;
    double tail_max = 0.0;
    for (const auto& [jl, jr] : splits) {
      const auto trace = run_episode(s, params(s, jl, jr, IdentityScheme{}), DelayConfig{tau_r, 0, 0},
                                     EngineMode::ZeroLocalDelay, {false, ""});
      double tail = 0.0;
      for (const auto& rec : trace.slots) {
        if (rec.t > tau_r + 50) track = std::max(track, distance(rec.executed, rec.optimum));
        if (rec.t + 100 > trace.slots.size()) tail += rec.cost - rec.opt_cost;
      }
      tail_max = std::max(tail_max, std::abs(tail));
    }
    return std::pair{track, tail_max};
  };
  // The preset's round trip is one slot. With tau_r = 3 each of the three
  // interleaved chains advances only J steps per three slots; reported, not gated.
  const auto [track, tail] = measure(preset("static-sanity").delays.round_trip());
  const auto [track3, tail3] = measure(3);
  const bool ok = track <= kStaticTracking && tail < kStaticRegretTail;
  return finish(4, "Static convergence", ok,
                "5 step splits at tau_r=1: max tracking error " + fmt(track) + ", max tail regret " + fmt(tail) +
                    " (info, tau_r=3: " + fmt(track3) + ", " + fmt(tail3) + ")",
                timer);
}

Result round_trip_equivalence() {
  const Timer timer;
  const auto& s = preset_scenario();
  const auto p = params(s, 2, 2, quantizer());
  const std::pair<std::size_t, std::size_t> splits[] = {{2, 1}, {3, 0}, {1, 2}};
  std::vector<RunTrace> traces;
  for (const auto& [u, d] : splits)
    traces.push_back(run_episode(s, p, DelayConfig{u, d, 0}, EngineMode::ZeroLocalDelay, {false, ""}));
  std::size_t mismatches = 0;
  for (std::size_t k = 1; k < traces.size(); ++k)
    for (std::size_t i = 0; i < traces[0].slots.size(); ++i)
      if (traces[k].slots[i].executed.flat() != traces[0].slots[i].executed.flat()) ++mismatches;
  return finish(5, "Round-trip equivalence", mismatches == 0,
                std::to_string(mismatches) + " differing slots over 3 delay splits", timer);
}

Result oracle_equivalence() {
  const Timer timer;
  std::mt19937_64 rng(derive_seed({2024, 6}));
  std::uniform_real_distribution<double> unit;
  double worst_opt = 0.0;
  for (int k = 0; k < 100; ++k) {
    ScenarioSpec spec;
    const std::size_t C = 1 + rng() % 3;
    for (std::size_t c = 0; c < C; ++c) spec.dims.push_back(1 + rng() % 4);
    spec.m = 2 + rng() % 5;
    spec.horizon = 1;
    spec.mu = 0.2 + 1.8 * unit(rng);
    spec.a_max = 0.5 + 1.5 * unit(rng);
    spec.seed = rng();
    for (auto d : spec.dims) spec.feasible.push_back(Ball{Vec::Zero(static_cast<Eigen::Index>(d)), 1e3});
    const auto s = CostScenario::generate(spec);
    const Mat q = CoupledQuadratic::coupling(s.data(1));
    const Mat h = q.transpose() * q + spec.mu * Mat::Identity(q.cols(), q.cols());
    const Vec normal_eq = h.colPivHouseholderQr().solve(q.transpose() * CoupledQuadratic::target(s.data(1)));
    const auto it = minimize_coupled_iterative(s.model(), s.data(1), s.feasible());
    worst_opt = std::max(worst_opt, (it.x.flat() - normal_eq).cwiseAbs().maxCoeff());
  }

  // Centralized delayed multi-step descent written directly for C = 1.
  ScenarioSpec spec;
  spec.dims = {4};
  spec.m = 6;
  spec.horizon = 200;
  spec.mu = 1.0;
  spec.a_max = 1.5;
  spec.seed = 77;
  spec.drift = DriftModel{DriftKind::DecayingWalk, 0.8, 0.3, 5};
  spec.feasible = {Ball{Vec::Zero(4), 0.4}};
  const auto s = CostScenario::generate(spec);
  const double radius = 0.4;
  auto proj = [&](const Vec& v) { return v.norm() <= radius ? v : Vec(v * (radius / v.norm())); };
  double worst_ref = 0.0;
  int projected = 0;
  const std::tuple<std::size_t, std::size_t, int, int> cases[] = {
      {1, 0, 2, 2}, {2, 1, 2, 2}, {1, 0, 1, 0}, {1, 1, 0, 3}, {3, 0, 3, 1}};
  for (const auto& [u, d, jl, jr] : cases) {
    const auto p = params(s, jl, jr, IdentityScheme{}, 9);
    const auto trace = run_episode(s, p, DelayConfig{u, d, 0}, EngineMode::ZeroLocalDelay, {false, ""});
    const std::size_t tau = u + d;
    std::vector<Vec> x;
    for (std::size_t t = 1; t <= s.horizon(); ++t) {
      if (t <= tau) {
        x.push_back(trace.slots[t - 1].executed.flat());
        continue;
      }
      Vec y = x[t - tau - 1];
      auto step = [&](std::size_t slot) {
        const LocalData& dd = s.data(slot, WorkerId{0});
        const Vec grad = dd.A.transpose() * (dd.A * y - dd.b) + spec.mu * y;
        const Vec raw = y - grad / p.alpha;
        if (raw.norm() > radius) ++projected;
        y = proj(raw);
      };
      for (int j = 0; j < jr; ++j) step(t - tau);
      for (int j = 0; j < jl; ++j) step(t);
      x.push_back(y);
      worst_ref = std::max(worst_ref, (trace.slots[t - 1].executed.flat() - y).cwiseAbs().maxCoeff());
    }
  }
  const bool ok = worst_opt <= kOptimumAgreement && worst_ref <= kReferenceAgreement;
  return finish(6, "Oracle equivalence", ok,
                "max optimum gap " + fmt(worst_opt) + " over 100 instances; max reference gap " + fmt(worst_ref) +
                    " (" + std::to_string(projected) + " projected steps)",
                timer);
}

Result measure_soundness() {
  const Timer timer;
  const auto& s = preset_scenario();
  std::vector<BoundRun> runs = zero_local_runs();
  for (auto& r : local_delay_runs()) runs.push_back(std::move(r));

  std::mt19937_64 rng(derive_seed({2024, 7}));
  double worst_ratio = 0.0;
  bool sampled_ok = true;
  for (int k = 0; k < 50; ++k) {
    const auto& run = runs[static_cast<std::size_t>(k) % runs.size()];
    const auto& tr = run.trace;
    const std::size_t lag = protocol_delay(tr.delays, tr.mode);
    const std::size_t t = lag + 1 + rng() % (s.horizon() - lag);
    const std::size_t source = t - lag;
    const std::size_t own_slot = t - tr.delays.tau_l;
    std::vector<LocalData> est;
    for (std::size_t c = 0; c < s.workers(); ++c)
      est.push_back(recover(compress(WorkerId{c}, source, s.data(source, WorkerId{c}), tr.params.compression)));
    const DataView est_view(est);

    double master_max = 0.0;
    double worker_max = 0.0;
    for (std::size_t i = 0; i < kSamplesPerSlot; ++i) {
      const GlobalDecision x = sample_point(s.feasible(), rng);
      const Vec now = s.gradient(t, x).flat();
      const Vec master = s.model().gradient(est_view, x).flat();
      master_max = std::max({master_max, (master - now).norm(), (master - s.gradient(source, x).flat()).norm()});
      std::vector<DecisionBlock> w;
      for (std::size_t c = 0; c < s.workers(); ++c) {
        const WorkerId id{c};
        w.push_back(s.model().local_gradient(s.data(own_slot, id), x.block(id), s.model().global_info(est_view, id, x)));
      }
      const Vec worker = GlobalDecision(std::move(w)).flat();
      worker_max = std::max({worker_max, (worker - now).norm(), (worker - s.gradient(own_slot, x).flat()).norm()});
    }
    const auto sup = estimator_error_sup(s, tr.params, tr.delays, tr.mode, t);
    const double tol = 1e-12 * (1.0 + sup.value());
    if (master_max > sup.master + tol || worker_max > sup.worker + tol) sampled_ok = false;
    if (sup.value() > 0.0) worst_ratio = std::max(worst_ratio, std::max(master_max, worker_max) / sup.value());
  }

  bool path_ok = true;
  for (const auto& r : runs)
    path_ok = path_ok && r.report.inputs.path2 <= r.report.inputs.R * r.report.inputs.path * (1.0 + 1e-12);

  bool energy_ok = true;
  std::ostringstream energy;
  for (const CostScenario* sc : {&preset_scenario(), &static_scenario()}) {
    bool interior = true;
    for (std::size_t t = 1; t <= sc->horizon(); ++t) interior = interior && sc->per_slot_optimum(t).interior;
    if (!interior) continue;
    const double e = optimum_gradient_energy(*sc);
    energy_ok = energy_ok && e <= kInteriorEnergyPerSlot * static_cast<double>(sc->horizon());
    energy << fmt(e) << " ";
  }
  return finish(7, "Measure soundness", sampled_ok && path_ok && energy_ok,
                "50 slots x " + std::to_string(kSamplesPerSlot) + " samples, max sampled/closed-form ratio " +
                    fmt(worst_ratio) + "; Pi2 <= R Pi " + (path_ok ? "on all runs" : "FAILED") +
                    "; interior gradient energy " + energy.str(),
                timer);
}

Result recursion_inequality() {
  const Timer timer;
  std::ostringstream detail;
  bool ok = true;
  for (const auto& r : zero_local_runs()) {
    const auto c = recursion_check(r.trace, r.report.inputs);
    ok = ok && c.slack >= kRecursionSlack;
    detail << r.label << ": " << fmt(c.lhs) << " <= " << fmt(c.rhs) << "; ";
  }
  return finish(8, "Recursion inequality", ok, detail.str(), timer);
}

Result pinned_regression() {
  const Timer timer;
  const ExperimentConfig cfg = preset("thm1");
  const auto s = CostScenario::generate(cfg.scenario);
  const std::uint64_t seed = derive_seed({cfg.seed, 0});
  auto regret = [&](int jl, int jr) {
    return dynamic_regret(run_episode(s, params(s, jl, jr, cfg.algorithm.compression, seed), cfg.delays,
                                      EngineMode::ZeroLocalDelay, {false, ""}));
  };
  const double r22 = regret(2, 2);
  const double r10 = regret(1, 0);
  auto close = [](double a, double b) { return std::abs(a - b) <= kRegressionRelTol * std::abs(b); };
  const bool ok = r22 < r10 && close(r22, kPinnedRegretJ22) && close(r10, kPinnedRegretJ10);
  return finish(9, "Pinned-seed regression", ok,
                "regret(2,2) = " + format_double(r22) + ", regret(1,0) = " + format_double(r10) + " (recorded " +
                    format_double(kPinnedRegretJ22) + ", " + format_double(kPinnedRegretJ10) + ")",
                timer);
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, contraction_suite},      {2, zero_local_delay_bounds}, {3, local_delay_bound},
      {4, static_convergence},     {5, round_trip_equivalence}, {6, oracle_equivalence},
      {7, measure_soundness},      {8, recursion_inequality}, {9, pinned_regression},
  };
  return all;
}

bool run_all(std::ostream& os, const std::vector<int>& ids) {
  bool all = true;
  for (const auto& c : criteria()) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), c.id) == ids.end()) continue;
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = Result{c.id, "criterion " + std::to_string(c.id), false, std::string("threw: ") + e.what(), 0.0};
    }
    all = all && r.passed;
    os << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.detail << " ("
       << fmt(r.seconds, 3) << " s)" << std::endl;
  }
  return all;
}

}  // namespace hioco::acceptance
