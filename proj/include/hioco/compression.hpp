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

// Data compression applied by workers before uploading, and the matching
// recovery performed by the master. Only simple schemes are provided.

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hioco/local_data.hpp"

namespace hioco {

struct IdentityScheme {};

/// Uniform scalar quantizer over [lower, upper] with 2^bits cells and
/// midpoint reconstruction. Values outside the range are clipped.
struct QuantizeScheme {
  int bits = 8;
  double lower = -1.0;
  double upper = 1.0;
};

/// Adds i.i.d. Gaussian noise to every entry (privacy-style perturbation).
struct NoiseScheme {
  double stddev = 0.0;
  std::uint64_t seed = 0;
};

using CompressionScheme = std::variant<IdentityScheme, QuantizeScheme, NoiseScheme>;

void validate(const CompressionScheme& scheme);
std::string describe(const CompressionScheme& scheme);

/// Largest per-entry recovery error for in-range values; 0 for identity and
/// +inf for noise.
double entry_error_bound(const CompressionScheme& scheme);

struct QuantizedData {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::vector<std::uint32_t> a_codes;  // column-major
  std::vector<std::uint32_t> b_codes;
  double lower = 0.0;
  double step = 1.0;
};

struct CompressedData {
  WorkerId worker;
  std::size_t slot = 0;  // slot whose data this is
  std::variant<LocalData, QuantizedData> body;
};

/// The noise scheme draws from a stream derived from (seed, worker, slot), so
/// the output is reproducible and independent of call order.
CompressedData compress(WorkerId worker, std::size_t slot, const LocalData& data,
                        const CompressionScheme& scheme);

LocalData recover(const CompressedData& compressed);

}  // namespace hioco
