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

#include "hioco/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <thread>

#include "hioco/engine.hpp"
#include "hioco/errors.hpp"
#include "hioco/metrics.hpp"
#include "hioco/rng.hpp"

namespace hioco {

namespace {

template <class T>
std::vector<T> axis(const std::vector<T>& values, T fallback) {
  return values.empty() ? std::vector<T>{fallback} : values;
}

std::string slug(const std::string& s) {
  std::string out;
  for (char ch : s) out += std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '.' ? ch : '_';
  return out;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string conditional_cell(const ConditionalBound& b) { return b.valid() ? format_double(*b.value) : "invalid"; }
std::string xi_cell(const ConditionalBound& b) { return b.valid() ? format_double(b.xi) : "invalid"; }

}  // namespace

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& config, double alpha) {
  const auto& a = config.algorithm;
  const auto& s = config.sweep;
  std::vector<SweepPoint> points;
  std::set<std::string> seen;
  for (const auto& kind_name : axis<std::string>(s.baseline, "hioco"))
    for (auto tau_r : axis(s.tau_r, config.delays.round_trip()))
      for (auto tau_l : axis(s.tau_l, config.delays.tau_l))
        for (const auto& comp : axis(s.compression, a.compression))
          for (int jl : axis(s.J_l, a.J_l))
            for (int jr : axis(s.J_r, a.J_r)) {
              SweepPoint p;
              p.index = points.size();
              DelayConfig d = config.delays;
              if (!s.tau_r.empty()) d = DelayConfig{tau_r, 0, tau_l};
              d.tau_l = tau_l;
              p.delays = d;
              p.mode = tau_l == 0 ? EngineMode::ZeroLocalDelay : EngineMode::LocalDelay;
              if (kind_name == "hioco") {
                if (jl + jr < 1) continue;
                p.params.alpha = alpha;
                p.params.J_l = jl;
                p.params.J_r = jr;
                p.params.compression = comp;
              } else {
                p.baseline = baseline_kind_from_string(kind_name);
                p.params = baseline_params(*p.baseline, BaselineOptions{alpha, std::max(1, jl + jr), comp, 0});
              }
              std::ostringstream label;
              label << kind_name << "_Jl" << p.params.J_l << "_Jr" << p.params.J_r << "_tu" << d.tau_u << "_td"
                    << d.tau_d << "_tl" << d.tau_l << "_" << slug(describe(p.params.compression));
              p.label = label.str();
              if (!seen.insert(p.label).second) continue;
              p.params.init_seed = derive_seed({config.seed, p.index});
              points.push_back(std::move(p));
            }
  return points;
}

bool RunOutcome::bounds_hold() const {
  return std::all_of(results.begin(), results.end(), [](const PointResult& r) { return r.report.all_hold(); });
}

RunOutcome execute(const ExperimentConfig& config, const CostScenario& scenario, unsigned threads) {
  RunOutcome out;
  const ResolvedAlgorithm resolved = resolve(config.algorithm, scenario.constants());
  out.log = resolved.log;
  out.gamma = resolved.gamma;
  const auto points = expand_sweep(config, resolved.alpha);

  out.results.resize(points.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        const auto& p = points[i];
        RunTrace trace = run_episode(scenario, p.params, p.delays, p.mode, EpisodeOptions{false, p.label});
        BoundReport report = bound_report(scenario, trace, resolved.gamma);
        out.results[i] = PointResult{p, std::move(trace), std::move(report)};
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned n = threads != 0 ? threads : config.threads;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, points.size()));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  for (const auto& r : out.results)
    for (const auto& c : r.report.checks())
      if (!c.holds)
        out.log.push_back("bound violated: " + r.point.label + " " + c.name + " = " + format_double(c.bound) +
                          " < regret = " + format_double(r.report.regret));
  for (const auto& r : out.results) {
    if (r.report.mode == EngineMode::ZeroLocalDelay && !r.report.bound_ii.valid())
      out.log.push_back("not checked: " + r.point.label + " bound_ii (2 eta^J = " +
                        format_double(r.report.bound_ii.condition) + " >= 1)");
    if (r.report.mode == EngineMode::LocalDelay && !r.report.bound_thm2.valid())
      out.log.push_back("not checked: " + r.point.label + " bound_thm2 (4 eta^J = " +
                        format_double(r.report.bound_thm2.condition) + " >= 1)");
  }
  return out;
}

RunOutcome execute(const ExperimentConfig& config) {
  return execute(config, CostScenario::generate(config.scenario), config.threads);
}

void write_comparison_csv(std::ostream& os, const RunOutcome& outcome, const std::string& comment) {
  if (!comment.empty()) os << "# " << comment << '\n';
  os << kComparisonCsvHeader << '\n';
  for (const auto& r : outcome.results) {
    const auto& p = r.point;
    const auto& rep = r.report;
    const auto& in = rep.inputs;
    const std::string f[] = {
        p.label,
        p.baseline ? to_string(*p.baseline) : "hioco",
        std::to_string(p.params.J_l),
        std::to_string(p.params.J_r),
        std::to_string(p.delays.tau_u),
        std::to_string(p.delays.tau_d),
        std::to_string(p.delays.round_trip()),
        std::to_string(p.delays.tau_l),
        std::to_string(p.delays.total()),
        describe(p.params.compression),
        to_string(p.mode),
        format_double(in.mu),
        format_double(in.L),
        format_double(in.D),
        format_double(in.R),
        format_double(in.alpha),
        format_double(in.gamma),
        format_double(rep.constants.eta),
        format_double(rep.constants.beta),
        format_double(std::pow(rep.constants.eta, in.total_steps())),
        format_double(rep.regret),
        format_double(in.path),
        format_double(in.path2),
        format_double(in.delta),
        format_double(in.delta2),
        format_double(in.grad_energy),
        format_double(rep.bound_i),
        format_double(rep.bound_i_sharp),
        conditional_cell(rep.bound_ii),
        xi_cell(rep.bound_ii),
        format_double(rep.bound_thm2_i),
        conditional_cell(rep.bound_thm2),
        xi_cell(rep.bound_thm2),
        rep.all_hold() ? "true" : "false",
    };
    for (std::size_t i = 0; i < std::size(f); ++i) os << (i ? "," : "") << '"' << f[i] << '"';
    os << '\n';
  }
}

void print_summary(std::ostream& os, const RunOutcome& outcome) {
  os << std::left << std::setw(58) << "point" << std::right << std::setw(12) << "regret" << std::setw(12)
     << "bound_i" << std::setw(12) << "bound_ii" << std::setw(12) << "thm2" << std::setw(12) << "Pi"
     << std::setw(12) << "Delta" << "  ok\n";
  auto cell = [](const ConditionalBound& b) {
    std::ostringstream s;
    if (b.valid())
      s << std::setprecision(5) << *b.value;
    else
      s << "n/a";
    return s.str();
  };
  for (const auto& r : outcome.results) {
    const auto& rep = r.report;
    os << std::left << std::setw(58) << r.point.label << std::right << std::setprecision(5) << std::setw(12)
       << rep.regret << std::setw(12) << rep.bound_i << std::setw(12) << cell(rep.bound_ii) << std::setw(12)
       << cell(rep.bound_thm2) << std::setw(12) << rep.inputs.path << std::setw(12) << rep.inputs.delta << "  "
       << (rep.all_hold() ? "yes" : "NO") << '\n';
  }
}

void write_outputs(const ExperimentConfig& config, const RunOutcome& outcome, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string stamp = "generated " + timestamp();
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(dir) / name);
    if (!f) throw ConfigError("output.dir", "cannot write " + (fs::path(dir) / name).string());
    return f;
  };
  for (const auto& r : outcome.results) {
    if (config.output.traces) {
      auto f = open("trace_" + r.point.label + ".csv");
      write_trace_csv(f, r.trace, stamp);
    }
    auto f = open("report_" + r.point.label + ".json");
    nlohmann::json j = r.report;
    j["label"] = r.point.label;
    j["init_seed"] = r.point.params.init_seed;
    f << j.dump(2) << '\n';
  }
  {
    auto f = open("comparison.csv");
    write_comparison_csv(f, outcome, stamp);
  }
  nlohmann::json resolved = config_to_json(config);
  resolved["algorithm"]["alpha_resolved"] =
      outcome.results.empty() ? 0.0 : outcome.results.front().report.inputs.alpha;
  resolved["algorithm"]["gamma_resolved"] = outcome.gamma;
  auto f = open("resolved_config.json");
  f << resolved.dump(2) << '\n';
}

}  // namespace hioco
