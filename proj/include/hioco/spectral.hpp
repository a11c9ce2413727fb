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

#include <cstdint>

#include "hioco/core_model.hpp"

namespace hioco {

struct PowerIterationOptions {
  double tolerance = 1e-10;  // relative change of the eigenvalue estimate
  int max_iterations = 200000;
  std::uint64_t seed = 0x5eed;
};

struct PowerIterationResult {
  double eigenvalue = 0.0;
  Vec eigenvector;
  int iterations = 0;
  /// ||M v - lambda v|| / max(lambda, 1) at the returned pair.
  double residual = 0.0;
};

/// Dominant eigenvalue of a symmetric positive semidefinite matrix.
/// Throws ConvergenceError when the iteration cap is hit or the Rayleigh
/// quotient of the returned vector disagrees with the iterate.
PowerIterationResult dominant_eigenvalue(const Mat& m, const PowerIterationOptions& options = {});

/// lambda_max(Q^T Q) computed on the smaller Gram side.
double gram_spectral_radius(const Mat& q, const PowerIterationOptions& options = {});

}  // namespace hioco
