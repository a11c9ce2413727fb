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

// Command-line front end.
//
//   hioco run <config>|--preset <name> [--seed N] [--out-dir DIR]
//   hioco sweep <config>|--preset <name> [--seed N] [--out-dir DIR]
//   hioco accept [--only 2,8]
//
// Exit codes: 0 success, 2 config error, 3 bound violation, 4 convergence
// failure, 1 anything else.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hioco/acceptance.hpp"
#include "hioco/config.hpp"
#include "hioco/errors.hpp"
#include "hioco/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBound = 3;
constexpr int kExitConvergence = 4;

struct Common {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("config", c.config_path, "TOML or JSON experiment file");
  cmd->add_option("--preset", c.preset, "built-in configuration")
      ->check(CLI::IsMember(hioco::preset_names()));
  cmd->add_option("--seed", c.seed, "override the master seed");
  cmd->add_option("--out-dir", c.out_dir, "override output.dir");
  cmd->add_option("--threads", c.threads, "worker threads for sweep points (0: all cores)");
}

hioco::ExperimentConfig load(const Common& c) {
  if (c.config_path.empty() == c.preset.empty())
    throw hioco::ConfigError("command line", "give exactly one of a config file or --preset");
  hioco::ExperimentConfig cfg = c.preset.empty() ? hioco::load_config(c.config_path) : hioco::preset(c.preset);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out_dir.empty()) cfg.output.dir = c.out_dir;
  if (c.threads != 0) cfg.threads = c.threads;
  return cfg;
}

int execute(const Common& c, bool require_sweep) {
  const auto cfg = load(c);
  if (require_sweep && cfg.sweep.empty())
    std::cerr << "note: config has no sweep axes, running a single point\n";
  const auto outcome = hioco::execute(cfg);
  for (const auto& line : outcome.log) std::cerr << line << '\n';
  hioco::print_summary(std::cout, outcome);
  hioco::write_outputs(cfg, outcome, cfg.output.dir);
  std::cout << "outputs written to " << cfg.output.dir << '\n';
  return outcome.bounds_hold() ? 0 : kExitBound;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical online convex optimization simulator"};
  app.require_subcommand(1);

  Common run_opts;
  auto* run = app.add_subcommand("run", "run one configuration (its sweep axes included)");
  add_common(run, run_opts);

  Common sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "run a configuration's sweep and write the comparison table");
  add_common(sweep, sweep_opts);

  std::vector<int> only;
  auto* accept = app.add_subcommand("accept", "run the acceptance suite");
  accept->add_option("--only", only, "criterion ids to run")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return execute(run_opts, false);
    if (*sweep) return execute(sweep_opts, true);
    if (*accept) return hioco::acceptance::run_all(std::cout, only) ? 0 : 1;
  } catch (const hioco::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const hioco::ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const hioco::ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
