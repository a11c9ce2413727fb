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

#include "hioco/engine.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "hioco/errors.hpp"
#include "hioco/rng.hpp"

namespace hioco {

std::string to_string(EngineMode mode) {
  return mode == EngineMode::ZeroLocalDelay ? "zero-local-delay" : "local-delay";
}

EngineMode engine_mode_from_string(const std::string& s) {
  if (s == "zero-local-delay") return EngineMode::ZeroLocalDelay;
  if (s == "local-delay") return EngineMode::LocalDelay;
  throw ParameterError("unknown engine mode '" + s + "' (expected zero-local-delay or local-delay)");
}

std::size_t RunTrace::warmup_slots() const { return protocol_delay(delays, mode); }

std::size_t protocol_delay(const DelayConfig& delays, EngineMode mode) {
  return mode == EngineMode::LocalDelay ? delays.total() : delays.round_trip();
}

void validate(const HiocoParams& params) {
  if (params.J_l < 0 || params.J_r < 0) throw ParameterError("step counts J_l and J_r must be >= 0");
  if (params.total_steps() < 1) throw ParameterError("need J_l + J_r >= 1");
  if (!(params.alpha > 0.0) || !std::isfinite(params.alpha)) throw ParameterError("alpha must be positive");
  validate(params.compression);
}

DecisionBlock warmup_decision(const FeasibleSet& set, WorkerId c, std::size_t t, const HiocoParams& params) {
  std::mt19937_64 rng(derive_seed({params.init_seed, c.index, t, 0x1417ULL}));
  const auto& part = set.part(c);
  if (const auto* ball = std::get_if<Ball>(&part)) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit;
    Vec dir(ball->center.size());
    do {
      for (auto& e : dir) e = normal(rng);
    } while (dir.norm() == 0.0);
    const double radius = ball->radius * std::pow(unit(rng), 1.0 / static_cast<double>(dir.size()));
    return ball->center + dir.normalized() * radius;
  }
  const auto& box = std::get<Box>(part);
  Vec out(box.lower.size());
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out(i) = std::uniform_real_distribution<double>(box.lower(i), box.upper(i))(rng);
  return out;
}

// ---------------------------------------------------------------------------

MasterNode::MasterNode(std::shared_ptr<const CostModel> model, FeasibleSet feasible, HiocoParams params,
                       DelayConfig delays, EngineMode mode)
    : model_(std::move(model)),
      feasible_(std::move(feasible)),
      params_(std::move(params)),
      delays_(delays),
      mode_(mode),
      history_(feasible_.workers()) {}

void MasterNode::ingest(std::span<const UplinkPayload> delivered) {
  const std::size_t keep = delays_.tau_l + 1;
  for (const auto& up : delivered) {
    if (up.worker.index >= history_.size()) throw ProtocolError("uplink from unknown worker");
    auto& h = history_[up.worker.index];
    h.decisions[up.decision_slot] = up.decision;
    if (up.compressed) h.data[up.compressed->slot] = recover(*up.compressed);
    // Only the last tau_l + 1 entries can still be referenced.
    while (h.decisions.size() > keep) h.decisions.erase(h.decisions.begin());
    while (h.data.size() > keep) h.data.erase(h.data.begin());
  }
}

std::vector<DownlinkPayload> MasterNode::master_slot(std::size_t t, std::span<const UplinkPayload> delivered) {
  ingest(delivered);
  const std::size_t lag = protocol_delay(delays_, mode_);
  if (t <= lag) throw ProtocolError("master cannot act for slot " + std::to_string(t) + " <= " + std::to_string(lag));
  const std::size_t source = t - lag;

  const std::size_t C = history_.size();
  std::vector<DecisionBlock> start;
  estimates_.clear();
  for (std::size_t c = 0; c < C; ++c) {
    const auto& h = history_[c];
    auto dec = h.decisions.find(source);
    auto dat = h.data.find(source);
    if (dec == h.decisions.end() || dat == h.data.end()) {
      std::ostringstream os;
      os << "master is missing the slot-" << source << " " << (dec == h.decisions.end() ? "decision" : "data")
         << " of worker " << c << " needed for slot " << t;
      throw ProtocolError(os.str());
    }
    start.push_back(dec->second);
    estimates_.push_back(dat->second);
  }

  const DataView est(estimates_);
  iterates_.clear();
  iterates_.emplace_back(std::move(start));
  for (int j = 1; j <= params_.J_r; ++j) {
    // Jacobi: every block reads the other blocks of step j - 1.
    const GlobalDecision& prev = iterates_.back();
    std::vector<DecisionBlock> next;
    next.reserve(C);
    for (std::size_t c = 0; c < C; ++c) {
      const WorkerId id{c};
      const Vec g = model_->local_gradient(estimates_[c], prev.block(id), model_->global_info(est, id, prev));
      next.push_back(gradient_step(feasible_, id, prev.block(id), g, params_.alpha));
    }
    iterates_.emplace_back(std::move(next));
  }

  const GlobalDecision& out = iterates_.back();
  std::vector<DownlinkPayload> downlinks;
  downlinks.reserve(C);
  for (std::size_t c = 0; c < C; ++c) {
    const WorkerId id{c};
    downlinks.push_back(DownlinkPayload{id, t, source, out.block(id), model_->global_info(est, id, out)});
  }
  return downlinks;
}

// ---------------------------------------------------------------------------

const LocalData* LocalSensor::acquire(std::size_t t) const {
  const std::size_t slot = data_slot(t);
  if (slot == 0) return nullptr;
  return &scenario_->data(slot, worker_);
}

WorkerNode::WorkerNode(WorkerId id, std::shared_ptr<const CostModel> model, FeasibleSet feasible,
                       LocalSensor sensor, HiocoParams params, DelayConfig delays, EngineMode mode)
    : id_(id),
      model_(std::move(model)),
      feasible_(std::move(feasible)),
      sensor_(sensor),
      params_(std::move(params)),
      delays_(delays),
      mode_(mode) {}

UplinkPayload WorkerNode::make_uplink(std::size_t t, const DecisionBlock& x) const {
  UplinkPayload up{id_, t, x, std::nullopt};
  if (const LocalData* own = sensor_.acquire(t))
    up.compressed = compress(id_, sensor_.data_slot(t), *own, params_.compression);
  return up;
}

WorkerNode::SlotOutput WorkerNode::warmup_slot(std::size_t t) const {
  DecisionBlock x = warmup_decision(feasible_, id_, t, params_);
  return SlotOutput{x, make_uplink(t, x)};
}

WorkerNode::SlotOutput WorkerNode::worker_slot(std::size_t t, std::span<const DownlinkPayload> delivered) {
  const DownlinkPayload* mine = nullptr;
  for (const auto& d : delivered)
    if (d.worker == id_ && d.target_slot == t) mine = &d;
  if (mine == nullptr)
    throw ProtocolError("worker " + std::to_string(id_.index) + " has no downlink for slot " + std::to_string(t));

  const LocalData* own = sensor_.acquire(t);
  if (own == nullptr && params_.J_l > 0)
    throw ProtocolError("worker " + std::to_string(id_.index) + " has no local data at slot " + std::to_string(t));

  ginfo_ = mine->ginfo;
  iterates_.assign(1, mine->intermediate);
  for (int j = 1; j <= params_.J_l; ++j) {
    const DecisionBlock& prev = iterates_.back();
    const Vec g = model_->local_gradient(*own, prev, ginfo_);
    iterates_.push_back(gradient_step(feasible_, id_, prev, g, params_.alpha));
  }
  DecisionBlock x = iterates_.back();
  return SlotOutput{x, make_uplink(t, x)};
}

// ---------------------------------------------------------------------------

namespace {

template <class T>
std::vector<T> extract(std::vector<Payload> payloads, const char* link) {
  std::vector<T> out;
  out.reserve(payloads.size());
  for (auto& p : payloads) {
    auto* v = std::get_if<T>(&p);
    if (v == nullptr) throw ProtocolError(std::string("unexpected payload type on the ") + link);
    out.push_back(std::move(*v));
  }
  return out;
}

struct MasterRecord {
  std::vector<GlobalDecision> iterates;
  std::vector<LocalData> estimates;
  std::size_t data_slot = 0;
};

}  // namespace

RunTrace run_episode(const CostScenario& scenario, const HiocoParams& params, const DelayConfig& delays,
                     EngineMode mode, const EpisodeOptions& options) {
  validate(params);
  delays.validate();
  if (mode == EngineMode::ZeroLocalDelay && delays.tau_l != 0)
    throw ParameterError("zero-local-delay mode requires tau_l = 0; use local-delay mode");
  const double L = scenario.constants().L;
  if (params.alpha < L * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "alpha = " << params.alpha << " is below the smoothness constant L = " << L;
    throw ParameterError(os.str());
  }

  const std::size_t T = scenario.horizon();
  const std::size_t C = scenario.workers();
  const std::size_t lag = protocol_delay(delays, mode);
  auto model = std::shared_ptr<const CostModel>(&scenario.model(), [](const CostModel*) {});

  Network net(delays);
  MasterNode master(model, scenario.feasible(), params, delays, mode);
  std::vector<WorkerNode> workers;
  workers.reserve(C);
  for (std::size_t c = 0; c < C; ++c)
    workers.emplace_back(WorkerId{c}, model, scenario.feasible(), LocalSensor(scenario, WorkerId{c}, delays.tau_l),
                         params, delays, mode);

  std::map<std::size_t, MasterRecord> master_records;

  // Runs when uplinks are due. The batch delivered at slot s was sent at
  // s - tau_u and serves worker slot s + tau_d.
  auto master_phase = [&](std::size_t s) {
    auto uplinks = extract<UplinkPayload>(net.uplink.deliver(s), "uplink");
    if (uplinks.empty()) return;
    const std::size_t target = s + delays.tau_d;
    if (target <= lag || target > T) {
      master.ingest(uplinks);
      return;
    }
    for (auto& down : master.master_slot(target, uplinks)) net.downlink.send(s, std::move(down));
    if (options.diagnostics)
      master_records[target] = MasterRecord{master.last_iterates(), master.last_estimates(), target - lag};
  };

  RunTrace trace;
  trace.label = options.label;
  trace.params = params;
  trace.delays = delays;
  trace.mode = mode;
  trace.slots.reserve(T);

  for (std::size_t t = 1; t <= T; ++t) {
    master_phase(t);

    auto downlinks = extract<DownlinkPayload>(net.downlink.deliver(t), "downlink");
    const bool warm = t <= lag;
    std::vector<DecisionBlock> executed;
    executed.reserve(C);
    for (auto& w : workers) {
      auto out = warm ? w.warmup_slot(t) : w.worker_slot(t, downlinks);
      executed.push_back(std::move(out.executed));
      net.uplink.send(t, std::move(out.uplink));
    }

    // A zero-delay uplink is due in the same slot, after the workers sent.
    master_phase(t);

    SlotRecord rec;
    rec.t = t;
    rec.warmup = warm;
    rec.executed = GlobalDecision(std::move(executed));
    rec.cost = scenario.eval_cost(t, rec.executed);
    const auto& opt = scenario.per_slot_optimum(t);
    rec.optimum = opt.x;
    rec.opt_cost = opt.cost;

    if (options.diagnostics && !warm) {
      auto& diag = rec.diag;
      const auto it = master_records.find(t);
      if (it == master_records.end()) throw ProtocolError("no master record for slot " + std::to_string(t));
      const MasterRecord& mr = it->second;
      diag.master_output = mr.iterates.back();
      diag.master_data_slot = mr.data_slot;
      const DataView est(mr.estimates);
      for (std::size_t j = 1; j < mr.iterates.size(); ++j) {
        const Vec estimated = scenario.model().gradient(est, mr.iterates[j - 1]).flat();
        const Vec exact = scenario.gradient(mr.data_slot, mr.iterates[j - 1]).flat();
        diag.master_error = std::max(diag.master_error, (estimated - exact).norm());
      }

      diag.worker_data_slot = t > delays.tau_l ? t - delays.tau_l : 0;
      for (int j = 1; j <= params.J_l; ++j) {
        std::vector<DecisionBlock> y;
        std::vector<DecisionBlock> g;
        for (std::size_t c = 0; c < C; ++c) {
          const auto& its = workers[c].last_iterates();
          y.push_back(its[static_cast<std::size_t>(j - 1)]);
          g.push_back(scenario.local_gradient(diag.worker_data_slot, WorkerId{c}, y.back(), workers[c].last_ginfo()));
        }
        const GlobalDecision yj(std::move(y));
        const Vec exact = scenario.gradient(diag.worker_data_slot, yj).flat();
        diag.worker_error = std::max(diag.worker_error, (GlobalDecision(std::move(g)).flat() - exact).norm());
      }
      master_records.erase(it);
    }
    trace.slots.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace hioco
