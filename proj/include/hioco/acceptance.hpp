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

// The acceptance suite: nine property and bound checks at desk scale, each
// with its tolerances fixed here.

#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace hioco::acceptance {

inline constexpr double kContractionSlack = -1e-9;
inline constexpr double kStaticTracking = 1e-6;
inline constexpr double kStaticRegretTail = 1e-8;
inline constexpr double kOptimumAgreement = 1e-8;
inline constexpr double kReferenceAgreement = 1e-10;
inline constexpr double kInteriorEnergyPerSlot = 1e-12;
inline constexpr double kRecursionSlack = -1e-6;
inline constexpr std::size_t kSamplesPerSlot = 100000;
/// Relative tolerance on the recorded regression values.
inline constexpr double kRegressionRelTol = 1e-9;

struct Result {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

Result contraction_suite();
Result zero_local_delay_bounds();
Result local_delay_bound();
Result static_convergence();
Result round_trip_equivalence();
Result oracle_equivalence();
Result measure_soundness();
Result recursion_inequality();
Result pinned_regression();

struct Criterion {
  int id;
  std::function<Result()> run;
};

const std::vector<Criterion>& criteria();

/// Runs the selected criteria (all when `ids` is empty), printing one line
/// per criterion as it finishes. Returns true when every one passed.
bool run_all(std::ostream& os, const std::vector<int>& ids = {});

}  // namespace hioco::acceptance
