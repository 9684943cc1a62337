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


#ifndef ODC_HARNESS_HPP_
#define ODC_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "odc/network.hpp"
#include "odc/schedulers.hpp"
#include "odc/stochastic_models.hpp"

namespace odc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { kSingleNode, kNetwork };

struct HarvestSpec {
  enum class Kind { kPhases, kRandomUnits, kMarkov, kTrace };
  Kind kind = Kind::kRandomUnits;
  double total = 3600.0;  // mA·slot over the horizon
  std::vector<SlotRange> phases;
  int units = 180;
  std::vector<double> markov_levels;
  std::vector<std::vector<double>> markov_transition;
  std::size_t markov_start = 0;
  std::filesystem::path trace;
};

struct VoiSpec {
  enum class Kind { kGaussian, kTraceLux };
  Kind kind = Kind::kGaussian;
  double mean = 1.0;
  double variance = 0.5;
  std::size_t window = 10;
  int bins = 8;
};

struct ExperimentConfig {
  std::string name = "experiment";
  Scenario scenario = Scenario::kSingleNode;
  std::vector<PolicyKind> policies{PolicyKind::kCoa, PolicyKind::kOdc,
                                   PolicyKind::kSdc};
  std::size_t horizon = 200;
  double slot_seconds = 60.0;
  HarvestSpec harvest;
  VoiSpec voi;
  NodeParams node;
  double threshold = 20.0;  // E_Th, mA
  double coa_quantum = 1.0;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
  bool write_slot_logs = true;

  // Network scenario.
  std::vector<std::size_t> node_counts{50};
  double area = 100.0;
  double radius = 50.0;
};

// Flat `key = value` lines with `#` comments. Relative trace paths resolve
// against `base_dir`.
ExperimentConfig parse_config(std::istream& in,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
void validate_config(const ExperimentConfig& config);

struct TraceRecord {
  std::size_t slot = 0;
  double harvest_ma = 0.0;
  double lux = 0.0;
};

std::vector<TraceRecord> parse_trace(std::istream& in);
std::vector<TraceRecord> load_trace(const std::filesystem::path& path);

// Per-trial seed; every stream of a trial derives from it.
std::uint64_t trial_seed(const ExperimentConfig& config, std::size_t trial);

// Streams shared by every policy in a single-node trial.
EpisodeInputs make_trial_inputs(const ExperimentConfig& config,
                                std::size_t trial);

struct RegretReport {
  std::vector<double> policy_curve;  // mean cumulative VoI per slot
  std::vector<double> coa_curve;
  std::vector<double> regret;        // coa_curve - policy_curve
  std::vector<double> bound;         // envelope, empty without a suboptimal arm
  std::vector<double> usable_slots;  // mean count of solar slots so far
  double best_mean = 0.0;            // COA reward per unit energy
  PerArm<double> arm_means{};        // policy reward per unit energy
  PerArm<double> deltas{};           // <= 0 marks a non-suboptimal arm
  PerArm<double> mean_pulls{};
  PerArm<double> pull_bounds{};      // 0 where the arm is not suboptimal
};

RegretReport compute_regret(std::span<const std::vector<SlotLog>> policy_trials,
                            std::span<const std::vector<SlotLog>> coa_trials,
                            const NodeCosts& costs, double exploration);

struct SingleTrial {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<SlotLog>> logs;  // per configured policy
};

struct NetworkTrial {
  std::size_t nodes = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  Topology topology;
  std::vector<NetworkEpisode> episodes;  // per configured policy
};

struct CommonActivityRow {
  PolicyKind policy = PolicyKind::kOdc;
  std::size_t neighbors = 0;
  std::size_t nodes = 0;
  double empirical = 0.0;
  double closed_form = 0.0;
};

struct DensityRow {
  std::size_t nodes = 0;
  std::vector<double> sink_voi_per_node;  // per policy, mean over trials
  std::vector<double> node_voi;           // per policy, mean bandit reward
};

struct ExperimentSummary {
  std::vector<PolicyKind> policies;
  std::size_t horizon = 0;
  std::vector<SingleTrial> single;
  std::vector<NetworkTrial> network;
  std::vector<std::vector<double>> cumulative;  // per policy, per slot mean
  std::vector<DensityRow> density;
  std::vector<CommonActivityRow> common_activity;
};

ExperimentSummary run_experiment(const ExperimentConfig& config);

// Summary CSV text, one row per trial (per node count and trial for
// network runs).
std::string summary_csv(const ExperimentSummary& summary);

// cumulative_voi.csv, voi_vs_density.csv and common_activity.csv.
void emit_plot_data(const ExperimentSummary& summary,
                    const std::filesystem::path& dir);

// Writes per-slot logs, summary.csv, policies.csv, regret.csv and the plot
// data. `ODC_OUTPUT_DIR` overrides the configured directory.
std::filesystem::path write_outputs(const ExperimentConfig& config,
                                    const ExperimentSummary& summary);

std::filesystem::path output_directory(const ExperimentConfig& config);

}  // namespace odc

#endif  // ODC_HARNESS_HPP_
