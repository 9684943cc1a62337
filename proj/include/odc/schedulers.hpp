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

#ifndef ODC_SCHEDULERS_HPP_
#define ODC_SCHEDULERS_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "odc/ava_controller.hpp"
#include "odc/bandit.hpp"
#include "odc/stochastic_models.hpp"

namespace odc {

// Per-action energy costs in mA·slot.
struct NodeCosts {
  double sample = 19.0;
  double receive = 20.0;
  double transmit = 21.0;
  double store = 0.0;

  double of(Arm a) const;
  PerArm<double> reward_arms() const { return {sample, receive, transmit}; }
};

struct NodeParams {
  NodeCosts costs;
  double capacity = 2400.0;        // 40 mAh with 60 s slots
  double initial_energy = 1200.0;  // half of capacity
  double efficiency = 0.8;
  double exploration = 2.0;
  AvaController::Options ava;
  // When false, ODC compares against `fixed_threshold` instead of running
  // the adaptive controller.
  bool adaptive_threshold = true;
  double fixed_threshold = 0.0;
};

// Packets held in node memory, served highest VoI first.
class Backlog {
 public:
  void Push(double voi);
  double Pop();
  double Top() const;
  bool empty() const { return packets_.empty(); }
  std::size_t size() const { return packets_.size(); }
  double total() const { return total_; }

 private:
  std::vector<double> packets_;  // max-heap
  double total_ = 0.0;
};

// Everything a policy may look at when choosing the action of one slot.
struct NodeView {
  std::size_t slot = 0;
  HarvestSample harvest;
  double datum_voi = 0.0;  // VoI of the datum sampleable this slot
  double battery = 0.0;
  double capacity = 0.0;
  const Backlog* backlog = nullptr;
  bool has_children = false;
  const NodeCosts* costs = nullptr;

  // E(τ): battery plus this slot's harvest when it is usable.
  double budget() const {
    return battery + (harvest.solar ? harvest.power : 0.0);
  }
  bool Affordable(Arm a) const;
};

struct Choice {
  Arm arm = Arm::kStore;
  double threshold = 0.0;  // R_th(τ) in force for the decision
  bool idle = false;       // store slot that deliberately keeps the harvest
};

// One row of the per-slot log.
struct SlotLog {
  std::size_t slot = 0;
  Arm arm = Arm::kStore;
  bool idle = false;  // store slot without energy gain
  double harvest = 0.0;
  bool solar = false;
  double energy_direct = 0.0;   // harvest consumed directly by the action
  double energy_battery = 0.0;  // drawn from the battery
  double energy_stored = 0.0;   // added to the battery
  double energy_wasted = 0.0;   // lost to the capacity clamp
  double reward = 0.0;
  double threshold = 0.0;
  double backlog_voi = 0.0;  // D(τ) at the end of the slot
  double battery = 0.0;      // battery level at the end of the slot
  double cumulative_voi = 0.0;

  double energy_spent() const { return energy_direct + energy_battery; }
};

// Compact record of a decided slot; see NodeRuntime.
struct SlotDecision {
  Arm arm = Arm::kStore;
  double energy_spent = 0.0;
  double energy_stored = 0.0;
  double reward = 0.0;
  double threshold_at_decision = 0.0;
};

SlotDecision to_decision(const SlotLog& log);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual Choice Choose(const NodeView& view) = 0;
  virtual void Observe(const SlotLog& log) { (void)log; }
};

// Opportunistic duty cycling: threshold test, cold-start pulls, then the
// knapsack over UCB indices and a randomised draw.
class OdcPolicy : public Policy {
 public:
  OdcPolicy(const NodeParams& params, std::uint64_t seed);

  Choice Choose(const NodeView& view) override;
  void Observe(const SlotLog& log) override;

  const BanditState& bandit() const { return bandit_; }
  const AvaController& controller() const { return controller_; }

 private:
  NodeParams params_;
  BanditState bandit_;
  AvaController controller_;
  std::mt19937_64 rng_;
  double last_consumed_ = 0.0;
  double threshold_ = 0.0;
};

enum class CoaAction : std::uint8_t { kIdle, kStore, kProcess };

struct CoaOptions {
  double process_cost = 19.0;
  double capacity = 2400.0;
  double initial_energy = 1200.0;
  double efficiency = 1.0;  // lossless storage
  double quantum = 1.0;     // DP energy grid, mA·slot
};

struct CoaPlan {
  std::vector<CoaAction> actions;
  double total_voi = 0.0;
};

// Offline optimum over (slot, quantised energy) by dynamic programming.
// Processing a slot earns its datum VoI; with solar power available the cost
// is covered from harvest first and any surplus is discarded.
CoaPlan coa_schedule(std::span<const HarvestSample> harvest,
                     std::span<const double> voi, const CoaOptions& options);

struct PlanOutcome {
  bool feasible = true;
  double total_voi = 0.0;
  double direct_energy = 0.0;
  double battery_energy = 0.0;
  // Direct use plus every stored amount the plan later draws on.
  double committed_energy = 0.0;

  double efficiency() const {
    return committed_energy > 0.0 ? total_voi / committed_energy : 0.0;
  }
};

// Replays a process/store/idle plan on exact (unquantised) energy dynamics.
PlanOutcome evaluate_plan(std::span<const CoaAction> plan,
                          std::span<const HarvestSample> harvest,
                          std::span<const double> voi,
                          const CoaOptions& options);

class CoaPolicy : public Policy {
 public:
  explicit CoaPolicy(CoaPlan plan);
  Choice Choose(const NodeView& view) override;

  const CoaPlan& plan() const { return plan_; }

 private:
  CoaPlan plan_;
};

// Fixed duty cycle d = min(1, η·predicted / (horizon·average_cost)), with
// round(d·horizon) active slots spread evenly.
std::vector<bool> sdc_schedule(double predicted_total_harvest,
                               double average_cost, std::size_t horizon,
                               double efficiency);

class SdcPolicy : public Policy {
 public:
  // Leaves alternate sample/transmit; relays cycle sample/receive/transmit.
  SdcPolicy(std::vector<bool> active, bool relay);
  Choice Choose(const NodeView& view) override;

  double duty_cycle() const;

 private:
  std::vector<bool> active_;
  bool relay_;
  std::size_t phase_ = 0;
};

enum class PolicyKind { kOdc, kCoa, kSdc };
std::string_view policy_name(PolicyKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);

struct EpisodeInputs {
  std::vector<HarvestSample> harvest;
  std::vector<double> voi;
};

// Battery, backlog and energy accounting for one node. Policies choose;
// the runtime enforces affordability and the direct-use rules.
class NodeRuntime {
 public:
  explicit NodeRuntime(const NodeParams& params);

  NodeView View(std::size_t slot, HarvestSample harvest, double datum_voi,
                bool has_children) const;

  // Applies the energy side of `choice`. Unaffordable or unavailable
  // choices fall back to store (solar) or idle sleep.
  struct Pending {
    Choice choice;
    SlotLog log;
  };
  Pending Begin(const NodeView& view, Choice choice);

  // VoI of the packet a transmit in `pending` would send.
  double OfferedVoi(const Pending& pending) const;

  // Completes the slot. `received` is the VoI delivered to a receiving
  // node, `sent` tells whether a transmit handoff succeeded.
  SlotLog Finish(Pending pending, double datum_voi,
                 std::optional<double> received, bool sent);

  const Battery& battery() const { return battery_; }
  const Backlog& backlog() const { return backlog_; }
  double cumulative_voi() const { return cumulative_; }

 private:
  NodeParams params_;
  Battery battery_;
  Backlog backlog_;
  double cumulative_ = 0.0;
};

// Single node next to an always-receiving sink.
std::vector<SlotLog> run_node_episode(Policy& policy, const NodeParams& params,
                                      const EpisodeInputs& inputs);

std::unique_ptr<Policy> make_policy(PolicyKind kind, const NodeParams& params,
                                    const EpisodeInputs& inputs,
                                    std::uint64_t seed, bool relay = false);

std::vector<SlotLog> run_node_episode(PolicyKind kind,
                                      const NodeParams& params,
                                      const EpisodeInputs& inputs,
                                      std::uint64_t seed);

}  // namespace odc

#endif  // ODC_SCHEDULERS_HPP_
