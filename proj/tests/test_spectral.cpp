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

#include "hioco/errors.hpp"
#include "hioco/spectral.hpp"
#include "oracles.hpp"

using namespace hioco;

TEST_CASE("power iteration matches a dense symmetric eigensolver") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    const int rows = 3 + trial % 5;
    const int cols = 2 + trial % 7;
    Mat q(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) q(i, j) = normal(rng);
    const Mat m = q.transpose() * q;
    const auto r = dominant_eigenvalue(m);
    const double ref = oracle::max_eigenvalue(m);
    CHECK(r.eigenvalue == doctest::Approx(ref).epsilon(1e-8));
    CHECK(r.residual < 1e-3);
    CHECK(gram_spectral_radius(q) == doctest::Approx(ref).epsilon(1e-8));
  }
}

TEST_CASE("power iteration on a diagonal matrix") {
  Mat m = Mat::Zero(3, 3);
  m.diagonal() << 1.0, 5.0, 2.0;
  const auto r = dominant_eigenvalue(m);
  CHECK(r.eigenvalue == doctest::Approx(5.0));
  CHECK(std::abs(r.eigenvector(1)) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("power iteration reports failure instead of returning a guess") {
  Mat m = Mat::Zero(2, 2);
  m.diagonal() << 1.0, 0.999;
  CHECK_THROWS_AS(dominant_eigenvalue(m, PowerIterationOptions{1e-14, 3, 1}), ConvergenceError);
  CHECK_THROWS_AS(dominant_eigenvalue(Mat::Zero(2, 3)), ContractError);
}
