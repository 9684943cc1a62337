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

#ifndef ODC_BANDIT_HPP_
#define ODC_BANDIT_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>

namespace odc {

// The four node actions. Sample, receive and transmit return VoI rewards;
// store only moves harvested energy into the battery.
enum class Arm : std::uint8_t { kSample = 0, kReceive = 1, kTransmit = 2, kStore = 3 };

inline constexpr std::size_t kRewardArms = 3;
inline constexpr std::array<Arm, kRewardArms> kRewardArmOrder = {
    Arm::kSample, Arm::kReceive, Arm::kTransmit};

template <typename T>
using PerArm = std::array<T, kRewardArms>;

constexpr std::size_t index_of(Arm a) { return static_cast<std::size_t>(a); }
std::string_view arm_name(Arm a);
std::optional<Arm> parse_arm(std::string_view name);

class BanditError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ArmStats {
  std::uint64_t pull_count = 0;
  double cumulative_reward = 0.0;
  double cost = 1.0;
  // Running maximum of observed rewards; 1.0 before the first observation.
  double reward_upper_bound = 1.0;
};

struct BanditState {
  PerArm<ArmStats> arms;
  // N: every action taken, including store/idle slots.
  std::uint64_t total_pulls = 0;
  std::uint64_t store_pulls = 0;
  double exploration = 2.0;  // e'

  static BanditState WithCosts(const PerArm<double>& costs,
                               double exploration = 2.0);

  const ArmStats& stats(Arm a) const { return arms[index_of(a)]; }
};

// r̂_j: mean reward per unit cost. Requires at least one pull.
double estimate_reward_per_cost(const ArmStats& stats);

// B_j * sqrt(e_j ln N / n_j), with e_j = e' / c_j^2 supplied by the caller.
double padding(const ArmStats& stats, std::uint64_t total_pulls,
               double scaled_exploration);

// r̂_j + padding. Unpulled arms get +infinity so the knapsack admits them
// whenever they are affordable.
double ucb_index(const ArmStats& stats, std::uint64_t total_pulls,
                 double exploration);

PerArm<double> ucb_indices(const BanditState& state);

// Largest r̂_j over arms pulled at least once; 0 before any pull.
double best_estimate(const BanditState& state);

using Selection = PerArm<bool>;

// Greedy 0/1 knapsack: arms in decreasing index order (ties by arm order),
// each taken if it still fits in the remaining budget. Unavailable arms are
// never selected.
Selection density_ordered_knapsack(const PerArm<double>& indices,
                                   const PerArm<double>& costs, double budget,
                                   const PerArm<bool>& available = {true, true,
                                                                    true});

// Draw weights x_j / Σx for sample and receive, 2 x_j / Σx for transmit,
// renormalised to sum to one. nullopt when nothing is selected.
std::optional<PerArm<double>> action_probabilities(const Selection& x);

Arm draw_arm(const PerArm<double>& probabilities, std::mt19937_64& rng);

void record_pull(BanditState& state, Arm arm, double reward);

// Expected pull-count bound for a suboptimal reward arm (store_arm = false),
// or for the store arm (store_arm = true, where delta is the smallest gap).
double pull_count_bound(double delta, double c_max, double c_min,
                        double exploration, double usable_slots,
                        bool store_arm = false);

// Regret envelope: sum over suboptimal arms of
// (c_max/c_min)^2 e' ln|P'| / Δ_j + 2Δ_j, plus u* times the store-arm bound.
double regret_bound(std::span<const double> deltas, double best_mean,
                    double c_max, double c_min, double exploration,
                    double usable_slots);

}  // namespace odc

#endif  // ODC_BANDIT_HPP_
