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

#include "hioco/core_model.hpp"

#include <cmath>
#include <string>

#include "hioco/errors.hpp"

namespace hioco {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_descriptor(const SetDescriptor& s) {
  std::visit(overloaded{[](const Ball& b) {
                          if (!(b.radius > 0.0) || !std::isfinite(b.radius))
                            throw ParameterError("ball radius must be positive and finite");
                          if (b.center.size() == 0)
                            throw ParameterError("ball must have positive dimension");
                        },
                        [](const Box& b) {
                          if (b.lower.size() != b.upper.size() || b.lower.size() == 0)
                            throw ParameterError("box bounds must have equal positive dimension");
                          if ((b.lower.array() > b.upper.array()).any())
                            throw ParameterError("box lower bound exceeds upper bound");
                          if (!b.lower.allFinite() || !b.upper.allFinite())
                            throw ParameterError("box bounds must be finite");
                        }},
             s);
}

}  // namespace

GlobalDecision::GlobalDecision(std::vector<DecisionBlock> blocks) : blocks_(std::move(blocks)) {}

GlobalDecision GlobalDecision::zeros(const std::vector<std::size_t>& dims) {
  std::vector<DecisionBlock> blocks;
  blocks.reserve(dims.size());
  for (auto d : dims) blocks.push_back(Vec::Zero(static_cast<Eigen::Index>(d)));
  return GlobalDecision(std::move(blocks));
}

GlobalDecision GlobalDecision::from_flat(const Vec& flat, const std::vector<std::size_t>& dims) {
  std::size_t total = 0;
  for (auto d : dims) total += d;
  if (static_cast<std::size_t>(flat.size()) != total)
    throw ContractError("flat vector has dimension " + std::to_string(flat.size()) +
                        ", expected " + std::to_string(total));
  std::vector<DecisionBlock> blocks;
  Eigen::Index offset = 0;
  for (auto d : dims) {
    const auto n = static_cast<Eigen::Index>(d);
    blocks.push_back(flat.segment(offset, n));
    offset += n;
  }
  return GlobalDecision(std::move(blocks));
}

std::size_t GlobalDecision::dimension() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += static_cast<std::size_t>(b.size());
  return n;
}

std::vector<std::size_t> GlobalDecision::dims() const {
  std::vector<std::size_t> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(static_cast<std::size_t>(b.size()));
  return out;
}

const DecisionBlock& GlobalDecision::block(WorkerId c) const {
  if (c.index >= blocks_.size()) throw ContractError("worker index out of range");
  return blocks_[c.index];
}

DecisionBlock& GlobalDecision::block(WorkerId c) {
  if (c.index >= blocks_.size()) throw ContractError("worker index out of range");
  return blocks_[c.index];
}

Vec GlobalDecision::flat() const {
  Vec out(static_cast<Eigen::Index>(dimension()));
  Eigen::Index offset = 0;
  for (const auto& b : blocks_) {
    out.segment(offset, b.size()) = b;
    offset += b.size();
  }
  return out;
}

double distance(const GlobalDecision& a, const GlobalDecision& b) {
  if (a.dims() != b.dims()) throw ContractError("decision layouts differ");
  double sq = 0.0;
  for (std::size_t c = 0; c < a.workers(); ++c)
    sq += (a.blocks()[c] - b.blocks()[c]).squaredNorm();
  return std::sqrt(sq);
}

std::size_t descriptor_dim(const SetDescriptor& s) {
  return std::visit(overloaded{[](const Ball& b) { return static_cast<std::size_t>(b.center.size()); },
                               [](const Box& b) { return static_cast<std::size_t>(b.lower.size()); }},
                    s);
}

double descriptor_diameter(const SetDescriptor& s) {
  return std::visit(overloaded{[](const Ball& b) { return 2.0 * b.radius; },
                               [](const Box& b) { return (b.upper - b.lower).norm(); }},
                    s);
}

double descriptor_max_norm(const SetDescriptor& s) {
  return std::visit(
      overloaded{[](const Ball& b) { return b.center.norm() + b.radius; },
                 [](const Box& b) { return b.lower.cwiseAbs().cwiseMax(b.upper.cwiseAbs()).norm(); }},
      s);
}

FeasibleSet::FeasibleSet(std::vector<SetDescriptor> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw ParameterError("feasible set needs at least one worker");
  double diam_sq = 0.0;
  double norm_sq = 0.0;
  for (const auto& p : parts_) {
    check_descriptor(p);
    const double d = descriptor_diameter(p);
    const double r = descriptor_max_norm(p);
    diam_sq += d * d;
    norm_sq += r * r;
  }
  diameter_ = std::sqrt(diam_sq);
  max_norm_ = std::sqrt(norm_sq);
}

FeasibleSet FeasibleSet::uniform(const SetDescriptor& part, std::size_t workers) {
  return FeasibleSet(std::vector<SetDescriptor>(workers, part));
}

const SetDescriptor& FeasibleSet::part(WorkerId c) const {
  if (c.index >= parts_.size()) throw ContractError("worker index out of range");
  return parts_[c.index];
}

std::vector<std::size_t> FeasibleSet::dims() const {
  std::vector<std::size_t> out;
  for (const auto& p : parts_) out.push_back(descriptor_dim(p));
  return out;
}

std::size_t FeasibleSet::dimension() const {
  std::size_t n = 0;
  for (const auto& p : parts_) n += descriptor_dim(p);
  return n;
}

bool FeasibleSet::contains(WorkerId c, const Vec& point, double tol) const {
  const auto& s = part(c);
  if (static_cast<std::size_t>(point.size()) != descriptor_dim(s)) return false;
  return std::visit(
      overloaded{[&](const Ball& b) { return (point - b.center).norm() <= b.radius * (1.0 + tol) + tol; },
                 [&](const Box& b) {
                   return ((point.array() >= b.lower.array() - tol) &&
                           (point.array() <= b.upper.array() + tol))
                       .all();
                 }},
      s);
}

bool FeasibleSet::contains(const GlobalDecision& x, double tol) const {
  if (x.workers() != workers()) return false;
  for (std::size_t c = 0; c < workers(); ++c)
    if (!contains(WorkerId{c}, x.blocks()[c], tol)) return false;
  return true;
}

bool FeasibleSet::strictly_interior(const GlobalDecision& x, double margin) const {
  if (x.workers() != workers()) return false;
  for (std::size_t c = 0; c < workers(); ++c) {
    const Vec& p = x.blocks()[c];
    const bool inside = std::visit(
        overloaded{[&](const Ball& b) { return (p - b.center).norm() < b.radius - margin; },
                   [&](const Box& b) {
                     return ((p.array() > b.lower.array() + margin) &&
                             (p.array() < b.upper.array() - margin))
                         .all();
                   }},
        parts_[c]);
    if (!inside) return false;
  }
  return true;
}

DecisionBlock project(const FeasibleSet& set, WorkerId worker, const Vec& point) {
  const auto& s = set.part(worker);
  if (static_cast<std::size_t>(point.size()) != descriptor_dim(s))
    throw ContractError("projection point has dimension " + std::to_string(point.size()) +
                        ", worker " + std::to_string(worker.index) + " expects " +
                        std::to_string(descriptor_dim(s)));
  return std::visit(overloaded{[&](const Ball& b) -> Vec {
                                 const Vec offset = point - b.center;
                                 const double norm = offset.norm();
                                 if (norm <= b.radius) return point;
                                 return b.center + offset * (b.radius / norm);
                               },
                               [&](const Box& b) -> Vec { return point.cwiseMax(b.lower).cwiseMin(b.upper); }},
                    s);
}

GlobalDecision project(const FeasibleSet& set, const GlobalDecision& point) {
  if (point.workers() != set.workers()) throw ContractError("decision has wrong number of blocks");
  std::vector<DecisionBlock> blocks;
  blocks.reserve(point.workers());
  for (std::size_t c = 0; c < point.workers(); ++c)
    blocks.push_back(project(set, WorkerId{c}, point.blocks()[c]));
  return GlobalDecision(std::move(blocks));
}

DecisionBlock gradient_step(const FeasibleSet& set, WorkerId worker, const DecisionBlock& y,
                            const Vec& g, double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("step parameter alpha must be positive");
  if (g.size() != y.size())
    throw ContractError("gradient dimension " + std::to_string(g.size()) +
                        " does not match block dimension " + std::to_string(y.size()));
  return project(set, worker, y - g / alpha);
}

GlobalDecision gradient_step(const FeasibleSet& set, const GlobalDecision& y, const GlobalDecision& g,
                             double alpha) {
  if (y.workers() != set.workers() || g.workers() != set.workers())
    throw ContractError("decision has wrong number of blocks");
  std::vector<DecisionBlock> blocks;
  blocks.reserve(y.workers());
  for (std::size_t c = 0; c < y.workers(); ++c)
    blocks.push_back(gradient_step(set, WorkerId{c}, y.blocks()[c], g.blocks()[c], alpha));
  return GlobalDecision(std::move(blocks));
}

}  // namespace hioco
