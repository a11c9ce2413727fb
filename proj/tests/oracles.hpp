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

// Reference computations for the unit tests. Each one is written from the
// definitions with plain loops and shares no code with the library beyond
// the data types.

#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "hioco/core_model.hpp"
#include "hioco/cost_library.hpp"
#include "hioco/local_data.hpp"

namespace oracle {

using hioco::GlobalDecision;
using hioco::LocalData;
using hioco::Mat;
using hioco::Vec;

/// Nearest grid point of a 2-D set to `p`, scanning a fine grid over the
/// bounding square [lo, hi]^2 and keeping points accepted by `inside`.
template <class Inside>
Vec grid_projection_2d(const Vec& p, double lo, double hi, Inside inside, int steps = 2001) {
  Vec best(2);
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j) {
      Vec z(2);
      z << lo + (hi - lo) * i / (steps - 1), lo + (hi - lo) * j / (steps - 1);
      if (!inside(z)) continue;
      const double d = (z - p).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = z;
      }
    }
  return best;
}

/// 1/2 ||sum_c A^c x^c - sum_c b^c||^2 + mu/2 ||x||^2 with explicit loops.
inline double naive_cost(const std::vector<LocalData>& data, const std::vector<Vec>& x, double mu) {
  const Eigen::Index m = data.front().b.size();
  double residual = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double r = 0.0;
    for (std::size_t c = 0; c < data.size(); ++c) {
      for (Eigen::Index k = 0; k < x[c].size(); ++k) r += data[c].A(i, k) * x[c](k);
      r -= data[c].b(i);
    }
    residual += r * r;
  }
  double reg = 0.0;
  for (const auto& xc : x)
    for (Eigen::Index k = 0; k < xc.size(); ++k) reg += xc(k) * xc(k);
  return 0.5 * residual + 0.5 * mu * reg;
}

/// Central finite-difference gradient of f at x.
template <class F>
Vec finite_difference(F f, const Vec& x, double h = 1e-6) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

/// Largest eigenvalue of a symmetric matrix by a dense eigensolver.
inline double max_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline double min_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline Vec ball_projection(const Vec& v, const Vec& center, double radius) {
  const Vec d = v - center;
  const double n = d.norm();
  return n <= radius ? v : Vec(center + d * (radius / n));
}

/// Centralized delayed multi-step descent for one worker on a ball:
/// x_t = J_l steps on f_{t - tau_l} after J_r steps on f_{t - tau} from
/// x_{t - tau}. Slots t <= tau copy `warmup`.
inline std::vector<Vec> centralized_reference(const std::vector<LocalData>& data_by_slot, double mu, double alpha,
                                              double radius, std::size_t tau, std::size_t tau_l, int J_l, int J_r,
                                              const std::vector<Vec>& warmup) {
  std::vector<Vec> x;
  for (std::size_t t = 1; t <= data_by_slot.size(); ++t) {
    if (t <= tau) {
      x.push_back(warmup[t - 1]);
      continue;
    }
    Vec y = x[t - tau - 1];
    auto step = [&](const LocalData& d) {
      Vec grad = Vec::Zero(y.size());
      for (Eigen::Index k = 0; k < y.size(); ++k) {
        double s = mu * y(k);
        for (Eigen::Index i = 0; i < d.A.rows(); ++i) {
          double r = -d.b(i);
          for (Eigen::Index l = 0; l < y.size(); ++l) r += d.A(i, l) * y(l);
          s += d.A(i, k) * r;
        }
        grad(k) = s;
      }
      y = ball_projection(y - grad / alpha, Vec::Zero(y.size()), radius);
    };
    for (int j = 0; j < J_r; ++j) step(data_by_slot[t - tau - 1]);
    for (int j = 0; j < J_l; ++j) step(data_by_slot[t - tau_l - 1]);
    x.push_back(y);
  }
  return x;
}

/// Uniform sample from a ball or box block.
inline Vec sample_block(const hioco::SetDescriptor& d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  if (const auto* b = std::get_if<hioco::Ball>(&d)) {
    Vec dir(b->center.size());
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = normal(rng);
    const double r = b->radius * std::pow(unit(rng), 1.0 / static_cast<double>(dir.size()));
    return b->center + r * dir / dir.norm();
  }
  const auto& x = std::get<hioco::Box>(d);
  Vec v(x.lower.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = x.lower(i) + unit(rng) * (x.upper(i) - x.lower(i));
  return v;
}

inline GlobalDecision sample_point(const hioco::FeasibleSet& set, std::mt19937_64& rng) {
  std::vector<Vec> blocks;
  for (std::size_t c = 0; c < set.workers(); ++c) blocks.push_back(sample_block(set.part(hioco::WorkerId{c}), rng));
  return GlobalDecision(std::move(blocks));
}

/// Small scenario spec shared by several tests.
inline hioco::ScenarioSpec small_spec(std::uint64_t seed, std::size_t horizon = 60,
                                      hioco::DriftKind kind = hioco::DriftKind::RandomWalk, double radius = 3.0) {
  hioco::ScenarioSpec s;
  s.dims = {2, 3, 2};
  s.m = 4;
  s.horizon = horizon;
  s.mu = 0.8;
  s.a_max = 1.0;
  s.seed = seed;
  s.drift = hioco::DriftModel{kind, kind == hioco::DriftKind::Static ? 0.0 : 0.2, 0.5, seed + 1};
  for (auto d : s.dims) s.feasible.push_back(hioco::Ball{Vec::Zero(static_cast<Eigen::Index>(d)), radius});
  return s;
}

}  // namespace oracle
