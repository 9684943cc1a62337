// Copyright 2026 The ODC Authors
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

#include "odc/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace odc {

double NodeCosts::of(Arm a) const {
  switch (a) {
    case Arm::kSample:
      return sample;
    case Arm::kReceive:
      return receive;
    case Arm::kTransmit:
      return transmit;
    case Arm::kStore:
      return store;
  }
  return 0.0;
}

void Backlog::Push(double voi) {
  packets_.push_back(voi);
  std::push_heap(packets_.begin(), packets_.end());
  total_ += voi;
}

double Backlog::Pop() {
  if (packets_.empty()) throw std::logic_error("pop from empty backlog");
  std::pop_heap(packets_.begin(), packets_.end());
  const double v = packets_.back();
  packets_.pop_back();
  total_ = packets_.empty() ? 0.0 : total_ - v;
  return v;
}

double Backlog::Top() const { return packets_.empty() ? 0.0 : packets_.front(); }

bool NodeView::Affordable(Arm a) const {
  if (a == Arm::kStore) return true;
  const double cost = costs->of(a);
  return cost <= budget() + 1e-9;
}

SlotDecision to_decision(const SlotLog& log) {
  return {log.arm, log.energy_spent(), log.energy_stored, log.reward,
          log.threshold};
}

// ---------------------------------------------------------------------------
// ODC

OdcPolicy::OdcPolicy(const NodeParams& params, std::uint64_t seed)
    : params_(params),
      bandit_(BanditState::WithCosts(params.costs.reward_arms(),
                                     params.exploration)),
      controller_(params.ava),
      rng_(seed),
      threshold_(params.adaptive_threshold ? 0.0 : params.fixed_threshold) {}

Choice OdcPolicy::Choose(const NodeView& view) {
  const double budget = view.budget();
  const double in_force = threshold_;
  if (params_.adaptive_threshold) {
    threshold_ = controller_.Step(view.harvest.power, last_consumed_, budget);
  }

  Choice choice;
  choice.threshold = in_force;
  if (best_estimate(bandit_) < in_force) {
    choice.arm = Arm::kStore;
    return choice;
  }

  const PerArm<bool> available = {true, view.has_children,
                                  view.backlog != nullptr &&
                                      !view.backlog->empty()};
  for (Arm a : kRewardArmOrder) {
    const std::size_t j = index_of(a);
    if (available[j] && bandit_.arms[j].pull_count == 0 &&
        view.Affordable(a)) {
      choice.arm = a;
      return choice;
    }
  }

  const Selection x = density_ordered_knapsack(
      ucb_indices(bandit_), params_.costs.reward_arms(), budget, available);
  const auto probabilities = action_probabilities(x);
  choice.arm = probabilities ? draw_arm(*probabilities, rng_) : Arm::kStore;
  return choice;
}

void OdcPolicy::Observe(const SlotLog& log) {
  record_pull(bandit_, log.arm, log.reward);
  last_consumed_ = log.energy_spent();
}

// ---------------------------------------------------------------------------
// COA

namespace {

std::size_t grid_floor(double energy, double quantum) {
  return static_cast<std::size_t>(std::floor(energy / quantum + 1e-9));
}

}  // namespace

CoaPlan coa_schedule(std::span<const HarvestSample> harvest,
                     std::span<const double> voi, const CoaOptions& options) {
  if (!(options.quantum > 0.0) || options.quantum > options.process_cost) {
    throw std::invalid_argument(
        "coa_schedule: quantisation step must be positive and no larger "
        "than the process cost");
  }
  if (voi.size() < harvest.size()) {
    throw ModelError("coa_schedule: VoI trace shorter than harvest trace");
  }
  const std::size_t horizon = harvest.size();
  CoaPlan plan;
  plan.actions.assign(horizon, CoaAction::kIdle);
  if (horizon == 0) return plan;

  const double q = options.quantum;
  const std::size_t levels = grid_floor(options.capacity, q) + 1;
  const double c = options.process_cost;

  std::vector<double> next(levels, 0.0);
  std::vector<double> cur(levels, 0.0);
  std::vector<CoaAction> choice(horizon * levels, CoaAction::kIdle);

  for (std::size_t t = horizon; t-- > 0;) {
    const HarvestSample h = harvest[t];
    for (std::size_t k = 0; k < levels; ++k) {
      const double e = static_cast<double>(k) * q;
      double best = next[k];
      CoaAction act = CoaAction::kIdle;
      if (h.solar) {
        const std::size_t k2 = std::min(
            levels - 1, grid_floor(e + options.efficiency * h.power, q));
        if (next[k2] >= best) {
          best = next[k2];
          act = CoaAction::kStore;
        }
      }
      const double shortfall = h.solar ? std::max(0.0, c - h.power) : c;
      if (e + 1e-9 >= shortfall) {
        const std::size_t k2 = grid_floor(std::max(0.0, e - shortfall), q);
        const double v = voi[t] + next[k2];
        if (v > best + 1e-12) {
          best = v;
          act = CoaAction::kProcess;
        }
      }
      cur[k] = best;
      choice[t * levels + k] = act;
    }
    std::swap(cur, next);
  }

  std::size_t k = std::min(levels - 1, grid_floor(options.initial_energy, q));
  plan.total_voi = next[k];
  for (std::size_t t = 0; t < horizon; ++t) {
    const CoaAction act = choice[t * levels + k];
    plan.actions[t] = act;
    const HarvestSample h = harvest[t];
    const double e = static_cast<double>(k) * q;
    if (act == CoaAction::kStore) {
      k = std::min(levels - 1,
                   grid_floor(e + options.efficiency * h.power, q));
    } else if (act == CoaAction::kProcess) {
      const double shortfall = h.solar ? std::max(0.0, c - h.power) : c;
      k = grid_floor(std::max(0.0, e - shortfall), q);
    }
  }
  return plan;
}

PlanOutcome evaluate_plan(std::span<const CoaAction> plan,
                          std::span<const HarvestSample> harvest,
                          std::span<const double> voi,
                          const CoaOptions& options) {
  PlanOutcome out;
  double level = options.initial_energy;
  double pending_store = 0.0;
  const double c = options.process_cost;
  for (std::size_t t = 0; t < plan.size() && t < harvest.size(); ++t) {
    const HarvestSample h = harvest[t];
    switch (plan[t]) {
      case CoaAction::kIdle:
        break;
      case CoaAction::kStore:
        if (h.solar) {
          const double add =
              std::min(options.capacity - level, options.efficiency * h.power);
          level += add;
          pending_store += add;
        }
        break;
      case CoaAction::kProcess: {
        const double direct = h.solar ? std::min(c, h.power) : 0.0;
        const double shortfall = c - direct;
        if (level + 1e-9 < shortfall) {
          out.feasible = false;
          break;
        }
        level = std::max(0.0, level - shortfall);
        out.direct_energy += direct;
        out.battery_energy += shortfall;
        if (shortfall > 0.0) {
          out.committed_energy += pending_store;
          pending_store = 0.0;
        }
        out.total_voi += voi[t];
        break;
      }
    }
  }
  out.committed_energy += out.direct_energy;
  return out;
}

CoaPolicy::CoaPolicy(CoaPlan plan) : plan_(std::move(plan)) {}

Choice CoaPolicy::Choose(const NodeView& view) {
  Choice c;
  const CoaAction act = view.slot < plan_.actions.size()
                            ? plan_.actions[view.slot]
                            : CoaAction::kIdle;
  switch (act) {
    case CoaAction::kProcess:
      c.arm = Arm::kSample;
      break;
    case CoaAction::kStore:
      c.arm = Arm::kStore;
      break;
    case CoaAction::kIdle:
      c.arm = Arm::kStore;
      c.idle = true;
      break;
  }
  return c;
}

// ---------------------------------------------------------------------------
// SDC

std::vector<bool> sdc_schedule(double predicted_total_harvest,
                               double average_cost, std::size_t horizon,
                               double efficiency) {
  if (!(average_cost > 0.0)) {
    throw std::invalid_argument("sdc_schedule: average cost must be positive");
  }
  std::vector<bool> active(horizon, false);
  if (horizon == 0 || predicted_total_harvest <= 0.0) return active;
  double d = efficiency * predicted_total_harvest /
             (static_cast<double>(horizon) * average_cost);
  if (d > 1.0 - 1e-12) d = 1.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const double before = std::floor(static_cast<double>(t) * d + 1e-9);
    const double after = std::floor(static_cast<double>(t + 1) * d + 1e-9);
    active[t] = after > before;
  }
  return active;
}

SdcPolicy::SdcPolicy(std::vector<bool> active, bool relay)
    : active_(std::move(active)), relay_(relay) {}

double SdcPolicy::duty_cycle() const {
  if (active_.empty()) return 0.0;
  return static_cast<double>(std::count(active_.begin(), active_.end(), true)) /
         static_cast<double>(active_.size());
}

Choice SdcPolicy::Choose(const NodeView& view) {
  Choice c;
  if (view.slot >= active_.size() || !active_[view.slot]) {
    c.arm = Arm::kStore;
    return c;
  }
  static constexpr Arm kLeafCycle[] = {Arm::kSample, Arm::kTransmit};
  static constexpr Arm kRelayCycle[] = {Arm::kSample, Arm::kReceive,
                                        Arm::kTransmit};
  c.arm = relay_ ? kRelayCycle[phase_ % 3] : kLeafCycle[phase_ % 2];
  ++phase_;
  if (c.arm == Arm::kTransmit && view.backlog->empty()) c.arm = Arm::kSample;
  return c;
}

// ---------------------------------------------------------------------------
// Runtime

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kOdc:
      return "odc";
    case PolicyKind::kCoa:
      return "coa";
    case PolicyKind::kSdc:
      return "sdc";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  for (PolicyKind k : {PolicyKind::kOdc, PolicyKind::kCoa, PolicyKind::kSdc}) {
    if (policy_name(k) == name) return k;
  }
  return std::nullopt;
}

NodeRuntime::NodeRuntime(const NodeParams& params)
    : params_(params),
      battery_(params.capacity, params.initial_energy, params.efficiency) {}

NodeView NodeRuntime::View(std::size_t slot, HarvestSample harvest,
                           double datum_voi, bool has_children) const {
  NodeView v;
  v.slot = slot;
  v.harvest = harvest;
  v.datum_voi = datum_voi;
  v.battery = battery_.level();
  v.capacity = battery_.capacity();
  v.backlog = &backlog_;
  v.has_children = has_children;
  v.costs = &params_.costs;
  return v;
}

NodeRuntime::Pending NodeRuntime::Begin(const NodeView& view, Choice choice) {
  Pending p;
  SlotLog& log = p.log;
  log.slot = view.slot;
  log.harvest = view.harvest.power;
  log.solar = view.harvest.solar;
  log.threshold = choice.threshold;

  if (choice.arm != Arm::kStore && !view.Affordable(choice.arm)) {
    choice.arm = Arm::kStore;
    choice.idle = false;
  }
  log.arm = choice.arm;

  if (choice.arm == Arm::kStore) {
    if (choice.idle || !view.harvest.solar) {
      log.idle = true;
    } else {
      const double usable =
          std::max(0.0, view.harvest.power - params_.costs.store);
      const StoreResult r = battery_.Store(usable);
      log.energy_stored = r.stored;
      log.energy_wasted = r.wasted;
    }
  } else {
    const double cost = params_.costs.of(choice.arm);
    const double direct =
        view.harvest.solar ? std::min(cost, view.harvest.power) : 0.0;
    const double from_battery = cost - direct;
    battery_.Draw(from_battery);
    log.energy_direct = direct;
    log.energy_battery = from_battery;
  }
  p.choice = choice;
  return p;
}

double NodeRuntime::OfferedVoi(const Pending& pending) const {
  if (pending.log.arm != Arm::kTransmit) return 0.0;
  return backlog_.Top();
}

SlotLog NodeRuntime::Finish(Pending pending, double datum_voi,
                            std::optional<double> received, bool sent) {
  SlotLog& log = pending.log;
  switch (log.arm) {
    case Arm::kSample:
      log.reward = datum_voi;
      backlog_.Push(datum_voi);
      break;
    case Arm::kReceive:
      if (received) {
        log.reward = *received;
        backlog_.Push(*received);
      }
      break;
    case Arm::kTransmit:
      if (sent && !backlog_.empty()) log.reward = backlog_.Pop();
      break;
    case Arm::kStore:
      break;
  }
  cumulative_ += log.reward;
  log.cumulative_voi = cumulative_;
  log.backlog_voi = backlog_.total();
  log.battery = battery_.level();
  return log;
}

std::vector<SlotLog> run_node_episode(Policy& policy, const NodeParams& params,
                                      const EpisodeInputs& inputs) {
  const std::size_t horizon = inputs.harvest.size();
  if (inputs.voi.size() < horizon) {
    throw ModelError("VoI stream exhausted at slot " +
                     std::to_string(inputs.voi.size()));
  }
  NodeRuntime node(params);
  std::vector<SlotLog> logs;
  logs.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    const NodeView view = node.View(t, inputs.harvest[t], inputs.voi[t], false);
    auto pending = node.Begin(view, policy.Choose(view));
    SlotLog log = node.Finish(std::move(pending), inputs.voi[t], std::nullopt,
                              /*sent=*/true);
    policy.Observe(log);
    logs.push_back(log);
  }
  return logs;
}

namespace {

double total_power(const EpisodeInputs& inputs) {
  double s = 0.0;
  for (const HarvestSample& h : inputs.harvest) s += h.power;
  return s;
}

}  // namespace

std::unique_ptr<Policy> make_policy(PolicyKind kind, const NodeParams& params,
                                    const EpisodeInputs& inputs,
                                    std::uint64_t seed, bool relay) {
  switch (kind) {
    case PolicyKind::kOdc:
      return std::make_unique<OdcPolicy>(params, seed);
    case PolicyKind::kCoa: {
      CoaOptions opt;
      opt.process_cost = params.costs.sample;
      opt.capacity = params.capacity;
      opt.initial_energy = params.initial_energy;
      opt.efficiency = 1.0;
      return std::make_unique<CoaPolicy>(
          coa_schedule(inputs.harvest, inputs.voi, opt));
    }
    case PolicyKind::kSdc: {
      const NodeCosts& c = params.costs;
      const double avg = relay ? (c.sample + c.receive + c.transmit) / 3.0
                               : (c.sample + c.transmit) / 2.0;
      return std::make_unique<SdcPolicy>(
          sdc_schedule(total_power(inputs), avg, inputs.harvest.size(),
                       params.efficiency),
          relay);
    }
  }
  throw std::invalid_argument("unknown policy");
}

std::vector<SlotLog> run_node_episode(PolicyKind kind,
                                      const NodeParams& params,
                                      const EpisodeInputs& inputs,
                                      std::uint64_t seed) {
  NodeParams effective = params;
  if (kind == PolicyKind::kCoa) effective.efficiency = 1.0;
  auto policy = make_policy(kind, effective, inputs, seed);
  return run_node_episode(*policy, effective, inputs);
}

}  // namespace odc
