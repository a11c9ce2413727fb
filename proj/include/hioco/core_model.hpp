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

// Decision vectors, per-worker feasible sets, Euclidean projection and the
// projected gradient step that solves both the master and the worker
// subproblems in closed form.

#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <variant>
#include <vector>

namespace hioco {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Local decision of one worker.
using DecisionBlock = Vec;

/// Dense worker index in [0, C).
struct WorkerId {
  std::size_t index = 0;
  auto operator<=>(const WorkerId&) const = default;
};

/// Concatenation x = [x^1; ...; x^C] kept as per-worker blocks.
class GlobalDecision {
 public:
  GlobalDecision() = default;
  explicit GlobalDecision(std::vector<DecisionBlock> blocks);

  /// All-zero decision with the given block sizes.
  static GlobalDecision zeros(const std::vector<std::size_t>& dims);
  /// Splits a flat vector according to `dims`.
  static GlobalDecision from_flat(const Vec& flat, const std::vector<std::size_t>& dims);

  std::size_t workers() const { return blocks_.size(); }
  std::size_t dimension() const;
  std::vector<std::size_t> dims() const;

  const DecisionBlock& block(WorkerId c) const;
  DecisionBlock& block(WorkerId c);
  const std::vector<DecisionBlock>& blocks() const { return blocks_; }

  Vec flat() const;

 private:
  std::vector<DecisionBlock> blocks_;
};

/// Euclidean distance between two decisions with matching layout.
double distance(const GlobalDecision& a, const GlobalDecision& b);

struct Ball {
  Vec center;
  double radius = 1.0;
};

struct Box {
  Vec lower;
  Vec upper;
};

using SetDescriptor = std::variant<Ball, Box>;

std::size_t descriptor_dim(const SetDescriptor& s);
double descriptor_diameter(const SetDescriptor& s);
/// Largest Euclidean norm of a point in the set.
double descriptor_max_norm(const SetDescriptor& s);

/// Cartesian product X = X^1 x ... x X^C of balls and boxes.
class FeasibleSet {
 public:
  explicit FeasibleSet(std::vector<SetDescriptor> parts);

  /// Same descriptor replicated for every worker.
  static FeasibleSet uniform(const SetDescriptor& part, std::size_t workers);

  std::size_t workers() const { return parts_.size(); }
  const SetDescriptor& part(WorkerId c) const;
  const std::vector<SetDescriptor>& parts() const { return parts_; }
  std::vector<std::size_t> dims() const;
  std::size_t dimension() const;

  /// Exact diameter R of the product set.
  double diameter() const { return diameter_; }
  /// sup over X of ||x||.
  double max_norm() const { return max_norm_; }

  bool contains(WorkerId c, const Vec& point, double tol = 1e-12) const;
  bool contains(const GlobalDecision& x, double tol = 1e-12) const;
  /// True when every block lies strictly inside its set, with margin `margin`.
  bool strictly_interior(const GlobalDecision& x, double margin = 1e-9) const;

 private:
  std::vector<SetDescriptor> parts_;
  double diameter_ = 0.0;
  double max_norm_ = 0.0;
};

/// argmin over X^c of ||z - point||^2.
DecisionBlock project(const FeasibleSet& set, WorkerId worker, const Vec& point);

/// Blockwise projection onto the product set.
GlobalDecision project(const FeasibleSet& set, const GlobalDecision& point);

/// Unique minimizer over X^c of <g, x - y> + (alpha/2)||x - y||^2, i.e.
/// project(y - g / alpha).
DecisionBlock gradient_step(const FeasibleSet& set, WorkerId worker, const DecisionBlock& y,
                            const Vec& g, double alpha);

/// The same step applied to every block of a global decision.
GlobalDecision gradient_step(const FeasibleSet& set, const GlobalDecision& y,
                             const GlobalDecision& g, double alpha);

}  // namespace hioco
