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

#pragma once

#include <span>

#include "hioco/core_model.hpp"

namespace hioco {

/// Data collected by one worker in one slot: its coupling matrix A (m x n^c)
/// and its share b (length m) of the global target.
struct LocalData {
  Mat A;
  Vec b;
};

/// Per-worker data of a single slot, indexed by worker.
using DataView = std::span<const LocalData>;

}  // namespace hioco
