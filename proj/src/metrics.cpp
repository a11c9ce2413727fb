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

#include "hioco/metrics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "hioco/engine.hpp"
#include "hioco/errors.hpp"

namespace hioco {

namespace {

void require_complete(const RunTrace& trace) {
  if (trace.slots.empty()) throw ContractError("trace is empty");
  for (std::size_t i = 0; i < trace.slots.size(); ++i)
    if (trace.slots[i].t != i + 1) throw ContractError("trace is incomplete or out of order");
}

double step_norm(const RunTrace& trace, std::size_t i) {
  return i == 0 ? 0.0 : distance(trace.slots[i].optimum, trace.slots[i - 1].optimum);
}

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

struct AffineEstimate {
  Mat hessian;  // without the mu I term, which every estimator shares
  Vec linear;
};

// Worker c's estimator: own data `own[c]`, recovered data `est[l]` for l != c.
AffineEstimate worker_affine(const std::vector<LocalData>& own, const std::vector<LocalData>& est,
                             const std::vector<std::size_t>& dims) {
  Eigen::Index n = 0;
  for (auto d : dims) n += static_cast<Eigen::Index>(d);
  AffineEstimate out{Mat::Zero(n, n), Vec::Zero(n)};
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < dims.size(); ++c) {
    const Mat& ac = own[c].A;
    Vec rhs = own[c].b;
    Eigen::Index col = 0;
    for (std::size_t l = 0; l < dims.size(); ++l) {
      const Mat& al = l == c ? own[c].A : est[l].A;
      out.hessian.block(row, col, ac.cols(), al.cols()) = ac.transpose() * al;
      if (l != c) rhs += est[l].b;
      col += al.cols();
    }
    out.linear.segment(row, ac.cols()) = ac.transpose() * rhs;
    row += ac.cols();
  }
  return out;
}

// Same arithmetic as worker_affine, so identical data give identical terms.
AffineEstimate exact_affine(DataView data, const std::vector<std::size_t>& dims) {
  const std::vector<LocalData> v(data.begin(), data.end());
  return worker_affine(v, v, dims);
}

double affine_error_sup(const AffineEstimate& estimate, const AffineEstimate& exact, double x_max) {
  return spectral_norm(estimate.hessian - exact.hessian) * x_max + (estimate.linear - exact.linear).norm();
}

}  // namespace

double dynamic_regret(const RunTrace& trace) {
  require_complete(trace);
  double sum = 0.0;
  for (const auto& s : trace.slots) sum += s.cost - s.opt_cost;
  return sum;
}

double path_length(const RunTrace& trace) {
  require_complete(trace);
  double sum = 0.0;
  for (std::size_t i = 0; i < trace.slots.size(); ++i) sum += step_norm(trace, i);
  return sum;
}

double squared_path_length(const RunTrace& trace) {
  require_complete(trace);
  double sum = 0.0;
  for (std::size_t i = 0; i < trace.slots.size(); ++i) {
    const double d = step_norm(trace, i);
    sum += d * d;
  }
  return sum;
}

EstimatorErrorSup estimator_error_sup(const CostScenario& scenario, const HiocoParams& params,
                                      const DelayConfig& delays, EngineMode mode, std::size_t t) {
  const std::size_t lag = protocol_delay(delays, mode);
  if (t < 1 || t > scenario.horizon()) throw SlotRangeError("slot out of range");
  if (t <= lag) return {};

  const std::size_t C = scenario.workers();
  const std::size_t source = t - lag;
  const std::size_t own_slot = t - delays.tau_l;

  std::vector<LocalData> est;
  std::vector<LocalData> own;
  est.reserve(C);
  own.reserve(C);
  for (std::size_t c = 0; c < C; ++c) {
    const WorkerId id{c};
    est.push_back(recover(compress(id, source, scenario.data(source, id), params.compression)));
    own.push_back(scenario.data(own_slot, id));
  }

  const double x_max = scenario.constants().x_max;
  const auto dims = scenario.dims();
  const AffineEstimate exact_now = exact_affine(scenario.data(t), dims);
  const AffineEstimate master_est = worker_affine(est, est, dims);
  const AffineEstimate worker_est = worker_affine(own, est, dims);
  EstimatorErrorSup out;
  out.master = std::max(affine_error_sup(master_est, exact_now, x_max),
                        affine_error_sup(master_est, exact_affine(scenario.data(source), dims), x_max));
  out.worker = std::max(affine_error_sup(worker_est, exact_now, x_max),
                        affine_error_sup(worker_est, exact_affine(scenario.data(own_slot), dims), x_max));
  return out;
}

GradientErrorMeasures gradient_error_measures(const CostScenario& scenario, RunTrace& trace) {
  if (dynamic_cast<const CoupledQuadratic*>(&scenario.model()) == nullptr)
    throw NotImplementedError("closed-form gradient-error suprema exist only for the coupled quadratic");
  require_complete(trace);
  if (trace.slots.size() != scenario.horizon()) throw ContractError("trace and scenario horizons differ");

  GradientErrorMeasures out;
  for (auto& s : trace.slots) {
    const auto sup = estimator_error_sup(scenario, trace.params, trace.delays, trace.mode, s.t);
    s.master_err_sup = sup.master;
    s.worker_err_sup = sup.worker;
    s.grad_err_sup = sup.value();
    out.delta += s.grad_err_sup;
    out.delta2 += s.grad_err_sup * s.grad_err_sup;
  }
  trace.error_measures_filled = true;
  return out;
}

double optimum_gradient_energy(const CostScenario& scenario) {
  double sum = 0.0;
  for (std::size_t t = 1; t <= scenario.horizon(); ++t)
    sum += scenario.gradient(t, scenario.per_slot_optimum(t).x).flat().squaredNorm();
  return sum;
}

std::vector<TraceRow> trace_rows(const RunTrace& trace) {
  require_complete(trace);
  std::vector<TraceRow> rows;
  rows.reserve(trace.slots.size());
  TraceRow acc;
  for (std::size_t i = 0; i < trace.slots.size(); ++i) {
    const auto& s = trace.slots[i];
    const double step = step_norm(trace, i);
    acc.t = s.t;
    acc.cost = s.cost;
    acc.opt_cost = s.opt_cost;
    acc.regret_cum += s.cost - s.opt_cost;
    acc.path_cum += step;
    acc.path2_cum += step * step;
    acc.delta_cum += s.grad_err_sup;
    acc.delta2_cum += s.grad_err_sup * s.grad_err_sup;
    acc.track_err = distance(s.executed, s.optimum);
    rows.push_back(acc);
  }
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const RunTrace& trace, const std::string& comment) {
  if (!comment.empty()) os << "# " << comment << '\n';
  os << kTraceCsvHeader << '\n';
  for (const auto& r : trace_rows(trace)) {
    os << r.t << ',' << format_double(r.cost) << ',' << format_double(r.opt_cost) << ','
       << format_double(r.regret_cum) << ',' << format_double(r.path_cum) << ',' << format_double(r.path2_cum)
       << ',' << format_double(r.delta_cum) << ',' << format_double(r.delta2_cum) << ','
       << format_double(r.track_err) << '\n';
  }
}

}  // namespace hioco
