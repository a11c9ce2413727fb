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

#include "hioco/spectral.hpp"

#include <cmath>
#include <random>
#include <string>

#include "hioco/errors.hpp"

namespace hioco {

PowerIterationResult dominant_eigenvalue(const Mat& m, const PowerIterationOptions& options) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ContractError("power iteration needs a square matrix");

  PowerIterationResult result;
  if (m.norm() == 0.0) {
    result.eigenvector = Vec::Unit(m.rows(), 0);
    return result;
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Vec v(m.rows());
  for (auto& e : v) e = normal(rng);
  v.normalize();

  double lambda = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    Vec w = m * v;
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) {
      // Start vector fell in the null space; eigenvalue zero is only the
      // answer when the matrix itself vanishes, which was handled above.
      for (auto& e : v) e = normal(rng);
      v.normalize();
      continue;
    }
    v = w / norm;
    if (it > 1 && std::abs(next - lambda) <= options.tolerance * std::abs(next)) {
      lambda = next;
      result.iterations = it;
      break;
    }
    lambda = next;
    if (it == options.max_iterations)
      throw ConvergenceError("power iteration did not reach relative tolerance " +
                             std::to_string(options.tolerance) + " in " +
                             std::to_string(options.max_iterations) + " iterations");
  }

  // Rayleigh-quotient certificate on the final normalized vector.
  const Vec mv = m * v;
  const double rayleigh = v.dot(mv);
  if (std::abs(rayleigh - lambda) > 10.0 * options.tolerance * std::max(1.0, std::abs(lambda)))
    throw ConvergenceError("Rayleigh quotient " + std::to_string(rayleigh) +
                           " disagrees with power-iteration estimate " + std::to_string(lambda));
  result.eigenvalue = std::max(rayleigh, lambda);
  result.eigenvector = v;
  result.residual = (mv - rayleigh * v).norm() / std::max(1.0, std::abs(rayleigh));
  return result;
}

double gram_spectral_radius(const Mat& q, const PowerIterationOptions& options) {
  if (q.size() == 0) return 0.0;
  const Mat gram = q.rows() <= q.cols() ? Mat(q * q.transpose()) : Mat(q.transpose() * q);
  return dominant_eigenvalue(gram, options).eigenvalue;
}

}  // namespace hioco
