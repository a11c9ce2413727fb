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

#include "hioco/core_model.hpp"
#include "hioco/errors.hpp"
#include "oracles.hpp"

using namespace hioco;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("ball projection is the nearest point found by a grid search in the plane") {
  const FeasibleSet set({Ball{v2(0.5, -0.25), 1.0}});
  const double cell = 4.0 / 2000.0;
  for (const Vec& p : {v2(3.0, 1.0), v2(-2.0, -2.0), v2(0.6, 0.0), v2(0.5, 1.9)}) {
    const Vec got = project(set, WorkerId{0}, p);
    const Vec ref = oracle::grid_projection_2d(p, -1.5, 2.5, [](const Vec& z) { return (z - v2(0.5, -0.25)).norm() <= 1.0; });
    CHECK(set.contains(WorkerId{0}, got));
    // No feasible grid point is closer, and the grid resolves the distance to
    // within one cell diagonal.
    CHECK((got - p).norm() <= (ref - p).norm() + 1e-12);
    CHECK((ref - p).norm() - (got - p).norm() <= std::sqrt(2.0) * cell);
  }
}

TEST_CASE("box projection is the nearest point found by a grid search in the plane") {
  const FeasibleSet set({Box{v2(-1.0, 0.0), v2(0.5, 2.0)}});
  const double cell = 4.0 / 2000.0;
  for (const Vec& p : {v2(3.0, 1.0), v2(-2.0, -2.0), v2(0.0, 1.0), v2(0.2, 5.0)}) {
    const Vec got = project(set, WorkerId{0}, p);
    const Vec ref = oracle::grid_projection_2d(p, -2.0, 2.0, [](const Vec& z) {
      return z(0) >= -1.0 && z(0) <= 0.5 && z(1) >= 0.0 && z(1) <= 2.0;
    });
    CHECK(set.contains(WorkerId{0}, got));
    // No feasible grid point is closer, and the grid resolves the distance to
    // within one cell diagonal.
    CHECK((got - p).norm() <= (ref - p).norm() + 1e-12);
    CHECK((ref - p).norm() - (got - p).norm() <= std::sqrt(2.0) * cell);
  }
}

TEST_CASE("projection is non-expansive and satisfies the variational inequality") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 3.0);
  const FeasibleSet set({Ball{Vec::Zero(3), 1.5}, Box{Vec::Constant(2, -1.0), Vec::Constant(2, 0.5)}});
  for (int trial = 0; trial < 500; ++trial) {
    Vec a(5), b(5);
    for (int i = 0; i < 5; ++i) {
      a(i) = normal(rng);
      b(i) = normal(rng);
    }
    const auto pa = project(set, GlobalDecision::from_flat(a, set.dims()));
    const auto pb = project(set, GlobalDecision::from_flat(b, set.dims()));
    CHECK(set.contains(pa));
    CHECK((pa.flat() - pb.flat()).norm() <= (a - b).norm() + 1e-12);
    // <a - P(a), z - P(a)> <= 0 for every feasible z.
    const auto z = oracle::sample_point(set, rng);
    CHECK((a - pa.flat()).dot(z.flat() - pa.flat()) <= 1e-10);
  }
}

TEST_CASE("feasible points are fixed by projection") {
  std::mt19937_64 rng(3);
  const FeasibleSet set({Ball{Vec::Zero(2), 2.0}, Box{Vec::Constant(3, -1.0), Vec::Constant(3, 1.0)}});
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = oracle::sample_point(set, rng);
    CHECK(distance(project(set, x), x) == 0.0);
  }
}

TEST_CASE("diameter and max norm of product sets") {
  const FeasibleSet balls = FeasibleSet::uniform(Ball{Vec::Zero(4), 3.0}, 3);
  CHECK(balls.diameter() == doctest::Approx(6.0 * std::sqrt(3.0)));
  CHECK(balls.max_norm() == doctest::Approx(3.0 * std::sqrt(3.0)));
  CHECK(balls.dimension() == 12);

  const FeasibleSet mixed({Ball{v2(1.0, 0.0), 1.0}, Box{v2(-1.0, 0.0), v2(2.0, 4.0)}});
  CHECK(mixed.diameter() == doctest::Approx(std::sqrt(4.0 + 9.0 + 16.0)));
  CHECK(mixed.max_norm() == doctest::Approx(std::sqrt(4.0 + 4.0 + 16.0)));
  CHECK(descriptor_dim(mixed.part(WorkerId{1})) == 2);
}

TEST_CASE("membership tests") {
  const FeasibleSet set({Ball{Vec::Zero(2), 1.0}});
  CHECK(set.contains(WorkerId{0}, v2(0.6, 0.8)));
  CHECK_FALSE(set.contains(WorkerId{0}, v2(0.6, 0.81)));
  CHECK_FALSE(set.contains(WorkerId{0}, Vec::Zero(3)));
  CHECK(set.strictly_interior(GlobalDecision({v2(0.1, 0.1)})));
  CHECK_FALSE(set.strictly_interior(GlobalDecision({v2(0.6, 0.8)})));
}

TEST_CASE("gradient step is the projected step and validates its inputs") {
  const FeasibleSet set({Box{Vec::Constant(2, -1.0), Vec::Constant(2, 1.0)}});
  const Vec y = v2(0.5, 0.5);
  const Vec g = v2(2.0, -4.0);
  const Vec z = gradient_step(set, WorkerId{0}, y, g, 2.0);
  CHECK(z(0) == doctest::Approx(-0.5));
  CHECK(z(1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(gradient_step(set, WorkerId{0}, y, g, 0.0), ParameterError);
  CHECK_THROWS_AS(gradient_step(set, WorkerId{0}, y, Vec::Zero(3), 1.0), ContractError);
  CHECK_THROWS_AS(project(set, WorkerId{1}, y), ContractError);
}

TEST_CASE("decision layout helpers") {
  const auto x = GlobalDecision::from_flat((Vec(5) << 1, 2, 3, 4, 5).finished(), {2, 3});
  CHECK(x.workers() == 2);
  CHECK(x.block(WorkerId{1})(0) == 3.0);
  CHECK(x.flat().sum() == 15.0);
  CHECK(GlobalDecision::zeros({2, 3}).flat().norm() == 0.0);
  CHECK_THROWS_AS(GlobalDecision::from_flat(Vec::Zero(4), {2, 3}), ContractError);
  CHECK_THROWS_AS(x.block(WorkerId{2}), ContractError);
  CHECK_THROWS_AS(FeasibleSet({Ball{Vec::Zero(2), -1.0}}), ParameterError);
  CHECK_THROWS_AS(FeasibleSet({Box{Vec::Constant(2, 1.0), Vec::Constant(2, 0.0)}}), ParameterError);
}
