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

#include "hioco/cost_library.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hioco/errors.hpp"
#include "hioco/rng.hpp"
#include "hioco/spectral.hpp"

namespace hioco {

namespace {

void check_layout(DataView data, const GlobalDecision& x) {
  if (data.size() != x.workers())
    throw ContractError("data for " + std::to_string(data.size()) + " workers but decision has " +
                        std::to_string(x.workers()) + " blocks");
  for (std::size_t c = 0; c < data.size(); ++c)
    if (data[c].A.cols() != x.blocks()[c].size())
      throw ContractError("block " + std::to_string(c) + " has dimension " +
                          std::to_string(x.blocks()[c].size()) + ", data expects " +
                          std::to_string(data[c].A.cols()));
}

Vec residual(DataView data, const GlobalDecision& x) {
  Vec r = Vec::Zero(data.front().b.size());
  for (std::size_t c = 0; c < data.size(); ++c) r += data[c].A * x.blocks()[c] - data[c].b;
  return r;
}

}  // namespace

GlobalDecision CostModel::gradient(DataView data, const GlobalDecision& x) const {
  std::vector<DecisionBlock> blocks;
  blocks.reserve(x.workers());
  for (std::size_t c = 0; c < x.workers(); ++c) {
    const WorkerId id{c};
    blocks.push_back(local_gradient(data[c], x.block(id), global_info(data, id, x)));
  }
  return GlobalDecision(std::move(blocks));
}

CoupledQuadratic::CoupledQuadratic(double mu) : mu_(mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("strong-convexity modulus mu must be positive");
}

double CoupledQuadratic::cost(DataView data, const GlobalDecision& x) const {
  check_layout(data, x);
  double reg = 0.0;
  for (const auto& b : x.blocks()) reg += b.squaredNorm();
  return 0.5 * residual(data, x).squaredNorm() + 0.5 * mu_ * reg;
}

Vec CoupledQuadratic::local_gradient(const LocalData& own, const DecisionBlock& xc, const Vec& ginfo) const {
  if (own.A.cols() != xc.size()) throw ContractError("local block dimension does not match local data");
  if (own.A.rows() != ginfo.size())
    throw ContractError("global information has length " + std::to_string(ginfo.size()) + ", expected " +
                        std::to_string(own.A.rows()));
  return own.A.transpose() * (own.A * xc - own.b + ginfo) + mu_ * xc;
}

Vec CoupledQuadratic::global_info(DataView data, WorkerId c, const GlobalDecision& x) const {
  check_layout(data, x);
  if (c.index >= data.size()) throw ContractError("worker index out of range");
  Vec g = Vec::Zero(data.front().b.size());
  for (std::size_t l = 0; l < data.size(); ++l) {
    if (l == c.index) continue;
    g += data[l].A * x.blocks()[l] - data[l].b;
  }
  return g;
}

GlobalDecision CoupledQuadratic::gradient(DataView data, const GlobalDecision& x) const {
  check_layout(data, x);
  const Vec r = residual(data, x);
  std::vector<DecisionBlock> blocks;
  blocks.reserve(x.workers());
  for (std::size_t c = 0; c < x.workers(); ++c)
    blocks.push_back(data[c].A.transpose() * r + mu_ * x.blocks()[c]);
  return GlobalDecision(std::move(blocks));
}

double CoupledQuadratic::smoothness(DataView data) const {
  return gram_spectral_radius(coupling(data)) + mu_;
}

double CoupledQuadratic::gradient_bound(DataView data, double max_norm) const {
  const Mat q = coupling(data);
  return (gram_spectral_radius(q) + mu_) * max_norm + (q.transpose() * target(data)).norm();
}

Mat CoupledQuadratic::coupling(DataView data) {
  if (data.empty()) throw ContractError("no worker data");
  Eigen::Index cols = 0;
  for (const auto& d : data) cols += d.A.cols();
  Mat q(data.front().A.rows(), cols);
  Eigen::Index offset = 0;
  for (const auto& d : data) {
    if (d.A.rows() != q.rows()) throw ContractError("workers disagree on the global-information length");
    q.middleCols(offset, d.A.cols()) = d.A;
    offset += d.A.cols();
  }
  return q;
}

Vec CoupledQuadratic::target(DataView data) {
  if (data.empty()) throw ContractError("no worker data");
  Vec b = Vec::Zero(data.front().b.size());
  for (const auto& d : data) b += d.b;
  return b;
}

Mat CoupledQuadratic::hessian(DataView data) const {
  const Mat q = coupling(data);
  Mat h = q.transpose() * q;
  h.diagonal().array() += mu_;
  return h;
}

SlotOptimum minimize_quadratic(const Mat& hessian, const Vec& linear, const FeasibleSet& set, double mu,
                               double L, const MinimizeOptions& options) {
  if (!(mu > 0.0) || !(L >= mu)) throw ParameterError("need 0 < mu <= L");
  const auto dims = set.dims();
  const double contraction = 1.0 - mu / L;
  // ||x_{k+1} - x*|| <= q / (1 - q) ||x_{k+1} - x_k|| for the projected step
  // with size 1/L, which contracts with factor q = 1 - mu / L.
  const double certify = contraction / (1.0 - contraction);

  Vec x = project(set, GlobalDecision::zeros(dims)).flat();
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Vec grad = hessian * x - linear;
    const Vec next = project(set, GlobalDecision::from_flat(x - grad / L, dims)).flat();
    const double moved = (next - x).norm();
    x = next;
    if (certify * moved <= options.tolerance * std::max(1.0, x.norm())) {
      SlotOptimum out;
      out.x = GlobalDecision::from_flat(x, dims);
      out.cost = 0.5 * x.dot(hessian * x) - linear.dot(x);
      out.interior = false;
      out.iterations = it;
      return out;
    }
    if (it == options.max_iterations) {
      std::ostringstream os;
      os << "projected gradient descent stopped after " << it << " iterations; last step " << moved
         << ", certified distance " << certify * moved << ", tolerance " << options.tolerance;
      throw ConvergenceError(os.str());
    }
  }
  throw ConvergenceError("projected gradient descent: no iterations performed");
}

SlotOptimum minimize_coupled_iterative(const CoupledQuadratic& model, DataView data, const FeasibleSet& set,
                                       const MinimizeOptions& options) {
  const Vec lin = CoupledQuadratic::coupling(data).transpose() * CoupledQuadratic::target(data);
  SlotOptimum out = minimize_quadratic(model.hessian(data), lin, set, model.mu(), model.smoothness(data), options);
  out.cost = model.cost(data, out.x);
  return out;
}

SlotOptimum minimize_coupled(const CoupledQuadratic& model, DataView data, const FeasibleSet& set,
                             const MinimizeOptions& options) {
  const auto dims = set.dims();
  const Mat h = model.hessian(data);
  const Vec lin = CoupledQuadratic::coupling(data).transpose() * CoupledQuadratic::target(data);
  const Vec unconstrained = h.llt().solve(lin);
  GlobalDecision candidate = GlobalDecision::from_flat(unconstrained, dims);
  if (set.contains(candidate, 0.0)) {
    SlotOptimum out;
    out.cost = model.cost(data, candidate);
    out.x = std::move(candidate);
    out.interior = true;
    return out;
  }
  return minimize_coupled_iterative(model, data, set, options);
}

std::string to_string(DriftKind kind) {
  switch (kind) {
    case DriftKind::Static: return "static";
    case DriftKind::RandomWalk: return "random-walk";
    case DriftKind::DecayingWalk: return "decaying-walk";
  }
  return "static";
}

DriftKind drift_kind_from_string(const std::string& s) {
  if (s == "static") return DriftKind::Static;
  if (s == "random-walk") return DriftKind::RandomWalk;
  if (s == "decaying-walk") return DriftKind::DecayingWalk;
  throw ParameterError("unknown drift kind '" + s + "' (expected static, random-walk or decaying-walk)");
}

void ScenarioSpec::validate() const {
  if (dims.empty()) throw ParameterError("scenario needs at least one worker");
  for (auto d : dims)
    if (d == 0) throw ParameterError("every worker block needs positive dimension");
  if (m == 0) throw ParameterError("global-information length m must be positive");
  if (horizon == 0) throw ParameterError("horizon T must be positive");
  if (!(mu > 0.0)) throw ParameterError("mu must be positive");
  if (!(a_max > 0.0)) throw ParameterError("a_max must be positive");
  if (drift.kind != DriftKind::Static && !(drift.sigma > 0.0))
    throw ParameterError("drift step scale sigma must be positive");
  if (!(drift.rho >= 0.0)) throw ParameterError("drift decay exponent rho must be >= 0");
  if (feasible.size() != dims.size())
    throw ParameterError("need one feasible-set descriptor per worker");
  for (std::size_t c = 0; c < dims.size(); ++c)
    if (descriptor_dim(feasible[c]) != dims[c])
      throw ParameterError("feasible set of worker " + std::to_string(c) + " has the wrong dimension");
}

void to_json(nlohmann::json& j, const SetDescriptor& s) {
  auto to_vec = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  if (const auto* b = std::get_if<Ball>(&s)) {
    j = {{"kind", "ball"}, {"center", to_vec(b->center)}, {"radius", b->radius}};
  } else {
    const auto& x = std::get<Box>(s);
    j = {{"kind", "box"}, {"lower", to_vec(x.lower)}, {"upper", to_vec(x.upper)}};
  }
}

void from_json(const nlohmann::json& j, SetDescriptor& s) {
  auto to_vec = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<double>>();
    return Vec(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "ball") {
    s = Ball{to_vec(j.at("center")), j.at("radius").get<double>()};
  } else if (kind == "box") {
    s = Box{to_vec(j.at("lower")), to_vec(j.at("upper"))};
  } else {
    throw ParameterError("unknown feasible-set kind '" + kind + "'");
  }
}

void to_json(nlohmann::json& j, const DriftModel& d) {
  j = {{"kind", to_string(d.kind)}, {"sigma", d.sigma}, {"rho", d.rho}, {"seed", d.seed}};
}

void from_json(const nlohmann::json& j, DriftModel& d) {
  d.kind = drift_kind_from_string(j.at("kind").get<std::string>());
  d.sigma = j.value("sigma", 0.0);
  d.rho = j.value("rho", 0.0);
  d.seed = j.value("seed", std::uint64_t{0});
}

void to_json(nlohmann::json& j, const ScenarioSpec& s) {
  j = {{"C", s.workers()}, {"dims", s.dims}, {"m", s.m},         {"T", s.horizon},
       {"mu", s.mu},       {"a_max", s.a_max}, {"drift", s.drift}, {"seed", s.seed},
       {"feasible", s.feasible}};
}

void from_json(const nlohmann::json& j, ScenarioSpec& s) {
  s.dims = j.at("dims").get<std::vector<std::size_t>>();
  if (j.contains("C") && j.at("C").get<std::size_t>() != s.dims.size())
    throw ParameterError("C does not match the number of block dimensions");
  s.m = j.at("m").get<std::size_t>();
  s.horizon = j.at("T").get<std::size_t>();
  s.mu = j.at("mu").get<double>();
  s.a_max = j.value("a_max", 1.0);
  s.drift = j.at("drift").get<DriftModel>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.feasible = j.at("feasible").get<std::vector<SetDescriptor>>();
}

CostScenario CostScenario::generate(const ScenarioSpec& spec) {
  spec.validate();
  const std::size_t C = spec.workers();
  const auto m = static_cast<Eigen::Index>(spec.m);

  std::mt19937_64 rng(derive_seed({spec.seed, 0xda7aULL}));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale_dist(0.6, 1.0);

  // Each worker gets its own matrix scale, so data are not identically
  // distributed across workers; ||A^c||_2 = s_c * a_max <= a_max.
  std::vector<LocalData> first(C);
  const double b_scale = 1.0 / std::sqrt(static_cast<double>(C));
  for (std::size_t c = 0; c < C; ++c) {
    Mat g(m, static_cast<Eigen::Index>(spec.dims[c]));
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(rng);
    const double norm = std::sqrt(gram_spectral_radius(g));
    first[c].A = g * (spec.a_max * scale_dist(rng) / norm);
    first[c].b = Vec(m);
    for (Eigen::Index i = 0; i < m; ++i) first[c].b(i) = b_scale * normal(rng);
  }

  std::vector<std::vector<LocalData>> data;
  data.reserve(spec.horizon);
  data.push_back(first);
  std::mt19937_64 drift_rng(derive_seed({spec.drift.seed, spec.seed, 0xd1f7ULL}));
  for (std::size_t t = 2; t <= spec.horizon; ++t) {
    std::vector<LocalData> slot = data.back();
    if (spec.drift.kind != DriftKind::Static) {
      const double step = spec.drift.kind == DriftKind::RandomWalk
                              ? spec.drift.sigma
                              : spec.drift.sigma * std::pow(static_cast<double>(t), -spec.drift.rho);
      std::vector<Vec> shares(C, Vec(m));
      Vec total = Vec::Zero(m);
      for (auto& w : shares) {
        for (Eigen::Index i = 0; i < m; ++i) w(i) = normal(drift_rng);
        total += w;
      }
      const double factor = step / total.norm();
      for (std::size_t c = 0; c < C; ++c) slot[c].b += factor * shares[c];
    }
    data.push_back(std::move(slot));
  }

  return CostScenario(std::make_shared<CoupledQuadratic>(spec.mu), FeasibleSet(spec.feasible),
                      std::move(data), spec);
}

CostScenario::CostScenario(std::shared_ptr<const CoupledQuadratic> model, FeasibleSet feasible,
                           std::vector<std::vector<LocalData>> data, std::optional<ScenarioSpec> spec)
    : model_(std::move(model)), feasible_(std::move(feasible)), data_(std::move(data)), spec_(std::move(spec)) {
  if (!model_) throw ContractError("scenario needs a cost model");
  if (data_.empty()) throw ParameterError("scenario needs at least one slot");
  const auto dims = feasible_.dims();
  m_ = static_cast<std::size_t>(data_.front().front().b.size());
  for (std::size_t t = 0; t < data_.size(); ++t) {
    if (data_[t].size() != dims.size())
      throw ContractError("slot " + std::to_string(t + 1) + " has data for the wrong number of workers");
    for (std::size_t c = 0; c < dims.size(); ++c) {
      const auto& d = data_[t][c];
      if (static_cast<std::size_t>(d.A.cols()) != dims[c] || static_cast<std::size_t>(d.A.rows()) != m_ ||
          static_cast<std::size_t>(d.b.size()) != m_)
        throw ContractError("slot " + std::to_string(t + 1) + ", worker " + std::to_string(c) +
                            ": data shape does not match the feasible set");
      if (!d.A.allFinite() || !d.b.allFinite())
        throw ParameterError("slot " + std::to_string(t + 1) + " contains non-finite data");
    }
  }

  constants_.mu = model_->mu();
  constants_.R = feasible_.diameter();
  constants_.x_max = feasible_.max_norm();
  constants_.slot_smoothness.reserve(data_.size());
  for (std::size_t t = 0; t < data_.size(); ++t) {
    const DataView view(data_[t]);
    const double lt = model_->smoothness(view);
    constants_.slot_smoothness.push_back(lt);
    constants_.L = std::max(constants_.L, lt);
    constants_.D = std::max(constants_.D, model_->gradient_bound(view, constants_.x_max));
  }

  optima_.reserve(data_.size());
  for (std::size_t t = 0; t < data_.size(); ++t) {
    try {
      optima_.push_back(minimize_coupled(*model_, DataView(data_[t]), feasible_));
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("slot " + std::to_string(t + 1) + ": " + e.what());
    }
  }
}

void CostScenario::check_slot(std::size_t t) const {
  if (t < 1 || t > data_.size())
    throw SlotRangeError("slot " + std::to_string(t) + " outside 1.." + std::to_string(data_.size()));
}

DataView CostScenario::data(std::size_t t) const {
  check_slot(t);
  return DataView(data_[t - 1]);
}

const LocalData& CostScenario::data(std::size_t t, WorkerId c) const {
  check_slot(t);
  if (c.index >= workers()) throw ContractError("worker index out of range");
  return data_[t - 1][c.index];
}

double CostScenario::eval_cost(std::size_t t, const GlobalDecision& x) const { return model_->cost(data(t), x); }

GlobalDecision CostScenario::gradient(std::size_t t, const GlobalDecision& x) const {
  return model_->gradient(data(t), x);
}

Vec CostScenario::local_gradient(std::size_t t, WorkerId c, const DecisionBlock& xc, const Vec& ginfo) const {
  return model_->local_gradient(data(t, c), xc, ginfo);
}

Vec CostScenario::global_info(std::size_t t, WorkerId c, const GlobalDecision& x) const {
  return model_->global_info(data(t), c, x);
}

const SlotOptimum& CostScenario::per_slot_optimum(std::size_t t) const {
  check_slot(t);
  return optima_[t - 1];
}

}  // namespace hioco
