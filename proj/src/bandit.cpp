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

#include "odc/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace odc {

std::string_view arm_name(Arm a) {
  switch (a) {
    case Arm::kSample:
      return "sample";
    case Arm::kReceive:
      return "receive";
    case Arm::kTransmit:
      return "transmit";
    case Arm::kStore:
      return "store";
  }
  return "?";
}

std::optional<Arm> parse_arm(std::string_view name) {
  for (Arm a : {Arm::kSample, Arm::kReceive, Arm::kTransmit, Arm::kStore}) {
    if (arm_name(a) == name) return a;
  }
  return std::nullopt;
}

BanditState BanditState::WithCosts(const PerArm<double>& costs,
                                   double exploration) {
  if (exploration < 1.0) throw BanditError("exploration constant e' < 1");
  BanditState s;
  s.exploration = exploration;
  for (std::size_t j = 0; j < kRewardArms; ++j) {
    if (!(costs[j] > 0.0)) throw BanditError("arm cost must be positive");
    s.arms[j].cost = costs[j];
  }
  return s;
}

double estimate_reward_per_cost(const ArmStats& stats) {
  if (stats.pull_count == 0) {
    throw BanditError("reward estimate requested for an unpulled arm");
  }
  return stats.cumulative_reward /
         (stats.cost * static_cast<double>(stats.pull_count));
}

double padding(const ArmStats& stats, std::uint64_t total_pulls,
               double scaled_exploration) {
  if (stats.pull_count == 0) throw BanditError("padding of an unpulled arm");
  if (total_pulls == 0) throw BanditError("padding with zero total pulls");
  const double log_n = std::log(static_cast<double>(total_pulls));
  return stats.reward_upper_bound *
         std::sqrt(scaled_exploration * log_n /
                   static_cast<double>(stats.pull_count));
}

double ucb_index(const ArmStats& stats, std::uint64_t total_pulls,
                 double exploration) {
  if (stats.pull_count == 0) return std::numeric_limits<double>::infinity();
  const double scaled = exploration / (stats.cost * stats.cost);
  return estimate_reward_per_cost(stats) +
         padding(stats, std::max<std::uint64_t>(total_pulls, 1), scaled);
}

PerArm<double> ucb_indices(const BanditState& state) {
  PerArm<double> out{};
  for (std::size_t j = 0; j < kRewardArms; ++j) {
    out[j] = ucb_index(state.arms[j], state.total_pulls, state.exploration);
  }
  return out;
}

double best_estimate(const BanditState& state) {
  double best = 0.0;
  for (const ArmStats& a : state.arms) {
    if (a.pull_count > 0) best = std::max(best, estimate_reward_per_cost(a));
  }
  return best;
}

Selection density_ordered_knapsack(const PerArm<double>& indices,
                                   const PerArm<double>& costs, double budget,
                                   const PerArm<bool>& available) {
  PerArm<std::size_t> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return indices[a] > indices[b];
                   });
  Selection x{};
  double remaining = budget;
  for (std::size_t j : order) {
    if (!available[j]) continue;
    if (costs[j] <= remaining) {
      x[j] = true;
      remaining -= costs[j];
    }
  }
  return x;
}

std::optional<PerArm<double>> action_probabilities(const Selection& x) {
  const double selected = static_cast<double>(std::count(x.begin(), x.end(), true));
  if (selected == 0.0) return std::nullopt;
  PerArm<double> w{};
  w[index_of(Arm::kSample)] = x[index_of(Arm::kSample)] ? 1.0 / selected : 0.0;
  w[index_of(Arm::kReceive)] =
      x[index_of(Arm::kReceive)] ? 1.0 / selected : 0.0;
  w[index_of(Arm::kTransmit)] =
      x[index_of(Arm::kTransmit)] ? 2.0 / selected : 0.0;
  const double total = w[0] + w[1] + w[2];
  for (double& p : w) p /= total;
  return w;
}

Arm draw_arm(const PerArm<double>& probabilities, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = u(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t j = 0; j < kRewardArms; ++j) {
    if (probabilities[j] <= 0.0) continue;
    acc += probabilities[j];
    last = j;
    if (r < acc) return kRewardArmOrder[j];
  }
  return kRewardArmOrder[last];
}

void record_pull(BanditState& state, Arm arm, double reward) {
  if (reward < 0.0) throw BanditError("negative reward");
  ++state.total_pulls;
  if (arm == Arm::kStore) {
    ++state.store_pulls;
    return;
  }
  ArmStats& s = state.arms[index_of(arm)];
  s.reward_upper_bound = std::max(s.reward_upper_bound, reward);
  ++s.pull_count;
  s.cumulative_reward += reward;
}

double pull_count_bound(double delta, double c_max, double c_min,
                        double exploration, double usable_slots,
                        bool store_arm) {
  if (!(delta > 0.0)) throw BanditError("pull-count bound needs delta > 0");
  if (!(c_min > 0.0) || c_max < c_min) {
    throw BanditError("pull-count bound needs c_max >= c_min > 0");
  }
  if (exploration < 1.0) throw BanditError("pull-count bound needs e' >= 1");
  if (usable_slots < 1.0) throw BanditError("pull-count bound needs |P'| >= 1");
  const double ratio = c_max / c_min;
  return ratio * ratio * exploration * std::log(usable_slots) /
             (delta * delta) +
         (store_arm ? 1.0 : 2.0);
}

double regret_bound(std::span<const double> deltas, double best_mean,
                    double c_max, double c_min, double exploration,
                    double usable_slots) {
  if (deltas.empty()) throw BanditError("regret bound needs suboptimal arms");
  if (!(c_min > 0.0) || c_max < c_min) {
    throw BanditError("regret bound needs c_max >= c_min > 0");
  }
  const double ratio_sq = (c_max / c_min) * (c_max / c_min);
  const double log_p = std::log(std::max(usable_slots, 1.0));
  double total = 0.0;
  double min_delta = std::numeric_limits<double>::infinity();
  for (double d : deltas) {
    if (!(d > 0.0)) throw BanditError("regret bound needs every delta > 0");
    total += ratio_sq * exploration * log_p / d + 2.0 * d;
    min_delta = std::min(min_delta, d);
  }
  total += best_mean *
           (ratio_sq * exploration * log_p / (min_delta * min_delta) + 1.0);
  return total;
}

}  // namespace odc
