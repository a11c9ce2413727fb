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

// Experiment configuration: TOML or JSON files, named presets and the
// resolution of "auto" fields against a generated scenario.
//
// Layout (TOML shown; JSON uses the same tree):
//
//   name = "thm1"
//   seed = 42                      # master seed for per-point streams
//   threads = 0                    # 0 = hardware concurrency
//   [scenario]
//   dims = [4, 4, 4]               # or C = 3 and n = 4
//   m = 6
//   T = 500
//   mu = 1.0
//   a_max = 1.0
//   seed = 42
//   feasible = { kind = "ball", radius = 3.0 }   # one for all, or a list
//   drift = { kind = "decaying-walk", sigma = 0.5, rho = 0.6, seed = 42 }
//   [delays]
//   tau_u = 1
//   tau_d = 0
//   tau_l = 0
//   [algorithm]
//   alpha = "auto"                 # resolves to L
//   gamma = "auto"                 # resolves to mu
//   J_l = 2
//   J_r = 2
//   compression = { kind = "quantize", bits = 8, lower = -4.0, upper = 4.0 }
//   [sweep]                        # every list optional; empty means "as above"
//   J_l = [1, 2]
//   J_r = [0, 2]
//   tau_r = [1, 3]
//   tau_l = [0]
//   compression = [{ kind = "identity" }]
//   baseline = ["hioco", "master-only"]
//   [output]
//   dir = "out"
//   traces = true

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hioco/baselines.hpp"
#include "hioco/compression.hpp"
#include "hioco/cost_library.hpp"
#include "hioco/delay_network.hpp"

namespace hioco {

void to_json(nlohmann::json& j, const CompressionScheme& c);
void from_json(const nlohmann::json& j, CompressionScheme& c);

struct AlgorithmSpec {
  std::optional<double> alpha;  // nullopt: auto, resolves to L
  std::optional<double> gamma;  // nullopt: auto, resolves to mu
  int J_l = 1;
  int J_r = 1;
  CompressionScheme compression = IdentityScheme{};
};

/// Sweep axes. "hioco" in `baseline` stands for the algorithm itself.
struct SweepSpec {
  std::vector<int> J_l;
  std::vector<int> J_r;
  std::vector<std::size_t> tau_r;  // realized as tau_u = tau_r, tau_d = 0
  std::vector<std::size_t> tau_l;
  std::vector<CompressionScheme> compression;
  std::vector<std::string> baseline;

  bool empty() const;
};

struct OutputSpec {
  std::string dir = "out";
  bool traces = true;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  ScenarioSpec scenario;
  DelayConfig delays;
  AlgorithmSpec algorithm;
  SweepSpec sweep;
  OutputSpec output;

  /// Checks everything that does not need the generated scenario. Throws
  /// ConfigError naming the offending field.
  void validate() const;
};

/// Parses the tree above. Throws ConfigError with the dotted field path.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

enum class ConfigFormat { Toml, Json };

/// Parses text in the given format. TOML syntax errors and field errors
/// carry the source line. `origin` prefixes diagnostics.
ExperimentConfig parse_config(const std::string& text, ConfigFormat format, const std::string& origin = "config");

/// Reads a file; the format follows the extension (.toml or .json).
ExperimentConfig load_config(const std::string& path);

/// Built-in configurations: "static-sanity", "thm1" and "thm2".
ExperimentConfig preset(const std::string& name);
const std::vector<std::string>& preset_names();

/// Algorithm parameters after resolving "auto" against a scenario.
struct ResolvedAlgorithm {
  double alpha = 0.0;
  double gamma = 0.0;
  std::vector<std::string> log;  // one line per resolved field
};

/// Throws ConfigError when alpha < L or gamma is outside (0, 2 mu).
ResolvedAlgorithm resolve(const AlgorithmSpec& spec, const ScenarioConstants& constants);

}  // namespace hioco
