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


#include "odc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace odc {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + value +
                      "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    if (!value.empty() && value[0] == '-') throw std::invalid_argument(value);
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" +
                      value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false");
}

std::vector<double> to_doubles(const std::string& key,
                               const std::string& value) {
  std::vector<double> out;
  for (const std::string& part : split(value, ',')) {
    out.push_back(to_double(key, part));
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream ids under one trial seed.
enum : std::uint64_t {
  kHarvestStream = 1,
  kVoiStream = 2,
  kPolicyStream = 3,
  kTopologyStream = 4,
};

std::uint64_t stream_seed(std::uint64_t trial, std::uint64_t stream,
                          std::uint64_t node = 0) {
  return splitmix64(splitmix64(trial ^ (stream << 56)) + node);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in,
                              const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError("key '" + key + "' has no value");

    if (key == "name") {
      c.name = value;
    } else if (key == "scenario") {
      if (value == "single-node") {
        c.scenario = Scenario::kSingleNode;
      } else if (value == "network") {
        c.scenario = Scenario::kNetwork;
      } else {
        throw ConfigError("key 'scenario': unknown value '" + value + "'");
      }
    } else if (key == "policies") {
      c.policies.clear();
      for (const std::string& name : split(value, ',')) {
        const auto kind = parse_policy(name);
        if (!kind) throw ConfigError("unknown policy '" + name + "'");
        c.policies.push_back(*kind);
      }
    } else if (key == "horizon") {
      c.horizon = to_uint(key, value);
    } else if (key == "slot_seconds") {
      c.slot_seconds = to_double(key, value);
    } else if (key == "harvest") {
      if (value == "phases") {
        c.harvest.kind = HarvestSpec::Kind::kPhases;
      } else if (value == "random_units") {
        c.harvest.kind = HarvestSpec::Kind::kRandomUnits;
      } else if (value == "markov") {
        c.harvest.kind = HarvestSpec::Kind::kMarkov;
      } else if (value == "trace") {
        c.harvest.kind = HarvestSpec::Kind::kTrace;
      } else {
        throw ConfigError("key 'harvest': unknown value '" + value + "'");
      }
    } else if (key == "harvest_total") {
      c.harvest.total = to_double(key, value);
    } else if (key == "harvest_phases") {
      c.harvest.phases.clear();
      for (const std::string& part : split(value, ',')) {
        const auto dash = part.find('-');
        if (dash == std::string::npos) {
          throw ConfigError("key 'harvest_phases': expected first-last");
        }
        c.harvest.phases.push_back(
            {to_uint(key, trim(part.substr(0, dash))),
             to_uint(key, trim(part.substr(dash + 1)))});
      }
    } else if (key == "harvest_units") {
      c.harvest.units = static_cast<int>(to_uint(key, value));
    } else if (key == "markov_levels") {
      c.harvest.markov_levels = to_doubles(key, value);
    } else if (key == "markov_transition") {
      c.harvest.markov_transition.clear();
      for (const std::string& row : split(value, ';')) {
        c.harvest.markov_transition.push_back(to_doubles(key, row));
      }
    } else if (key == "markov_start") {
      c.harvest.markov_start = to_uint(key, value);
    } else if (key == "trace") {
      const std::filesystem::path p = value;
      c.harvest.trace = p.is_absolute() ? p : base_dir / p;
    } else if (key == "voi") {
      if (value == "gaussian") {
        c.voi.kind = VoiSpec::Kind::kGaussian;
      } else if (value == "trace_lux") {
        c.voi.kind = VoiSpec::Kind::kTraceLux;
      } else {
        throw ConfigError("key 'voi': unknown value '" + value + "'");
      }
    } else if (key == "voi_mean") {
      c.voi.mean = to_double(key, value);
    } else if (key == "voi_variance") {
      c.voi.variance = to_double(key, value);
    } else if (key == "voi_window") {
      c.voi.window = to_uint(key, value);
    } else if (key == "voi_bins") {
      c.voi.bins = static_cast<int>(to_uint(key, value));
    } else if (key == "cost_sample") {
      c.node.costs.sample = to_double(key, value);
    } else if (key == "cost_receive") {
      c.node.costs.receive = to_double(key, value);
    } else if (key == "cost_transmit") {
      c.node.costs.transmit = to_double(key, value);
    } else if (key == "cost_store") {
      c.node.costs.store = to_double(key, value);
    } else if (key == "efficiency") {
      c.node.efficiency = to_double(key, value);
    } else if (key == "threshold") {
      c.threshold = to_double(key, value);
    } else if (key == "initial_energy") {
      c.node.initial_energy = to_double(key, value);
    } else if (key == "capacity") {
      c.node.capacity = to_double(key, value);
    } else if (key == "exploration") {
      c.node.exploration = to_double(key, value);
    } else if (key == "ava_step") {
      c.node.ava.step_size = to_double(key, value);
    } else if (key == "adaptive_threshold") {
      c.node.adaptive_threshold = to_bool(key, value);
    } else if (key == "fixed_threshold") {
      c.node.fixed_threshold = to_double(key, value);
    } else if (key == "coa_quantum") {
      c.coa_quantum = to_double(key, value);
    } else if (key == "trials") {
      c.trials = to_uint(key, value);
    } else if (key == "seed") {
      c.seed = to_uint(key, value);
    } else if (key == "output_dir") {
      c.output_dir = value;
    } else if (key == "slot_logs") {
      c.write_slot_logs = to_bool(key, value);
    } else if (key == "node_counts") {
      c.node_counts.clear();
      const auto parts = split(value, ':');
      if (parts.size() == 3) {
        const std::uint64_t first = to_uint(key, parts[0]);
        const std::uint64_t last = to_uint(key, parts[1]);
        const std::uint64_t step = to_uint(key, parts[2]);
        if (step == 0) throw ConfigError("key 'node_counts': zero step");
        for (std::uint64_t n = first; n <= last; n += step) {
          c.node_counts.push_back(n);
        }
      } else {
        for (const std::string& part : split(value, ',')) {
          c.node_counts.push_back(to_uint(key, part));
        }
      }
    } else if (key == "area") {
      c.area = to_double(key, value);
    } else if (key == "radius") {
      c.radius = to_double(key, value);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

void validate_config(const ExperimentConfig& c) {
  if (c.horizon < 1) throw ConfigError("horizon must be at least 1");
  if (c.trials < 1) throw ConfigError("trials must be at least 1");
  if (!(c.node.efficiency > 0.0 && c.node.efficiency <= 1.0)) {
    throw ConfigError("efficiency must lie in (0, 1]");
  }
  const NodeCosts& k = c.node.costs;
  if (!(k.sample > 0.0) || !(k.receive > 0.0) || !(k.transmit > 0.0)) {
    throw ConfigError("sample, receive and transmit costs must be positive");
  }
  if (k.store < 0.0) throw ConfigError("store cost must be non-negative");
  if (!(c.node.capacity > 0.0)) throw ConfigError("capacity must be positive");
  if (c.node.initial_energy < 0.0 || c.node.initial_energy > c.node.capacity) {
    throw ConfigError("initial_energy must lie in [0, capacity]");
  }
  if (c.threshold < 0.0) throw ConfigError("threshold must be non-negative");
  if (c.policies.empty()) throw ConfigError("no policies configured");
  if (c.harvest.kind == HarvestSpec::Kind::kTrace && c.harvest.trace.empty()) {
    throw ConfigError("harvest = trace needs a 'trace' path");
  }
  if (c.voi.kind == VoiSpec::Kind::kTraceLux &&
      c.harvest.kind != HarvestSpec::Kind::kTrace) {
    throw ConfigError("voi = trace_lux needs harvest = trace");
  }
  if (c.scenario == Scenario::kNetwork) {
    if (c.node_counts.empty()) throw ConfigError("node_counts is empty");
    for (std::size_t n : c.node_counts) {
      if (n == 0) throw ConfigError("node_counts entries must be positive");
    }
    if (c.harvest.kind == HarvestSpec::Kind::kTrace) {
      throw ConfigError("network scenario supports generated harvest only");
    }
  }
}

std::vector<TraceRecord> parse_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw TraceError("trace is empty");
  const auto header = split(trim(line), ',');
  for (const char* name : {"slot", "harvest_ma", "lux"}) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw TraceError(std::string("trace missing column '") + name + "'");
    }
  }
  auto col = [&](const char* name) {
    return static_cast<std::size_t>(
        std::find(header.begin(), header.end(), name) - header.begin());
  };
  const std::size_t c_slot = col("slot");
  const std::size_t c_h = col("harvest_ma");
  const std::size_t c_lux = col("lux");

  std::vector<TraceRecord> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() < header.size()) {
      throw TraceError("row " + std::to_string(row) + ": missing columns");
    }
    TraceRecord r;
    try {
      const long long slot = std::stoll(cells[c_slot]);
      r.harvest_ma = std::stod(cells[c_h]);
      r.lux = std::stod(cells[c_lux]);
      if (slot < 0) {
        throw TraceError("row " + std::to_string(row) + ": negative slot");
      }
      r.slot = static_cast<std::size_t>(slot);
    } catch (const std::logic_error&) {
      throw TraceError("row " + std::to_string(row) + ": malformed number");
    }
    if (r.harvest_ma < 0.0) {
      throw TraceError("row " + std::to_string(row) +
                       ": negative harvest_ma");
    }
    if (r.lux < 0.0) {
      throw TraceError("row " + std::to_string(row) + ": negative lux");
    }
    if (r.slot != out.size()) {
      if (r.slot > out.size()) {
        throw TraceError("gap in slot indices: slot " +
                         std::to_string(out.size()) + " missing");
      }
      throw TraceError("row " + std::to_string(row) +
                       ": slot out of order");
    }
    out.push_back(r);
  }
  if (out.empty()) throw TraceError("trace has no records");
  return out;
}

std::vector<TraceRecord> load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open trace '" + path.string() + "'");
  return parse_trace(in);
}

std::uint64_t trial_seed(const ExperimentConfig& config, std::size_t trial) {
  return config.seed + trial;
}

namespace {

std::vector<HarvestSample> make_harvest(const ExperimentConfig& c,
                                        std::uint64_t seed,
                                        const std::vector<TraceRecord>* trace) {
  const HarvestSpec& h = c.harvest;
  switch (h.kind) {
    case HarvestSpec::Kind::kPhases:
      return phase_schedule(h.total, h.phases, c.threshold, c.horizon)
          .Take(c.horizon);
    case HarvestSpec::Kind::kRandomUnits: {
      std::mt19937_64 rng(seed);
      return HarvestProcess::Schedule(
                 random_unit_schedule(h.total, h.units, c.horizon, rng),
                 c.threshold)
          .Take(c.horizon);
    }
    case HarvestSpec::Kind::kMarkov:
      return HarvestProcess::Markov(h.markov_levels, h.markov_transition,
                                    h.markov_start, c.threshold, seed)
          .Take(c.horizon);
    case HarvestSpec::Kind::kTrace: {
      std::vector<double> power;
      for (const TraceRecord& r : *trace) power.push_back(r.harvest_ma);
      power.resize(c.horizon);
      return HarvestProcess::Trace(std::move(power), c.threshold)
          .Take(c.horizon);
    }
  }
  throw ConfigError("unknown harvest kind");
}

std::vector<double> make_voi(const ExperimentConfig& c, std::uint64_t seed,
                             const std::vector<TraceRecord>* trace) {
  if (c.voi.kind == VoiSpec::Kind::kGaussian) {
    return VoiSource::Gaussian(c.voi.mean, c.voi.variance, seed)
        .Take(c.horizon);
  }
  std::vector<double> lux;
  for (const TraceRecord& r : *trace) lux.push_back(r.lux);
  lux.resize(c.horizon);
  return sliding_window_voi(lux, c.voi.window, c.voi.bins);
}

std::vector<TraceRecord> trace_for(const ExperimentConfig& c) {
  if (c.harvest.kind != HarvestSpec::Kind::kTrace) return {};
  auto records = load_trace(c.harvest.trace);
  if (records.size() < c.horizon) {
    throw ConfigError("horizon " + std::to_string(c.horizon) +
                      " exceeds trace length " +
                      std::to_string(records.size()));
  }
  return records;
}

EpisodeInputs inputs_with(const ExperimentConfig& c, std::uint64_t seed,
                          std::uint64_t node,
                          const std::vector<TraceRecord>* trace) {
  EpisodeInputs in;
  in.harvest = make_harvest(c, stream_seed(seed, kHarvestStream, node), trace);
  in.voi = make_voi(c, stream_seed(seed, kVoiStream, node), trace);
  return in;
}

NodeParams node_params(const ExperimentConfig& c) { return c.node; }

}  // namespace

EpisodeInputs make_trial_inputs(const ExperimentConfig& config,
                                std::size_t trial) {
  const auto trace = trace_for(config);
  return inputs_with(config, trial_seed(config, trial), 0, &trace);
}

RegretReport compute_regret(std::span<const std::vector<SlotLog>> policy_trials,
                            std::span<const std::vector<SlotLog>> coa_trials,
                            const NodeCosts& costs, double exploration) {
  if (policy_trials.size() != coa_trials.size() || policy_trials.empty()) {
    throw std::invalid_argument("regret needs matching non-empty trial sets");
  }
  const std::size_t horizon = policy_trials.front().size();
  for (std::size_t k = 0; k < policy_trials.size(); ++k) {
    if (policy_trials[k].size() != horizon || coa_trials[k].size() != horizon) {
      throw std::invalid_argument("regret needs equal horizons");
    }
  }
  const double trials = static_cast<double>(policy_trials.size());
  RegretReport rep;
  rep.policy_curve.assign(horizon, 0.0);
  rep.coa_curve.assign(horizon, 0.0);
  rep.usable_slots.assign(horizon, 0.0);
  double coa_reward = 0.0;
  double coa_energy = 0.0;
  PerArm<double> reward{}, energy{}, pulls{};
  for (std::size_t k = 0; k < policy_trials.size(); ++k) {
    double solar = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      const SlotLog& p = policy_trials[k][t];
      const SlotLog& o = coa_trials[k][t];
      rep.policy_curve[t] += p.cumulative_voi / trials;
      rep.coa_curve[t] += o.cumulative_voi / trials;
      if (p.solar) solar += 1.0;
      rep.usable_slots[t] += solar / trials;
      coa_reward += o.reward;
      coa_energy += o.energy_spent();
      if (p.arm != Arm::kStore) {
        const std::size_t j = index_of(p.arm);
        reward[j] += p.reward;
        energy[j] += costs.of(p.arm);
        pulls[j] += 1.0;
      }
    }
  }
  rep.regret.resize(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    rep.regret[t] = rep.coa_curve[t] - rep.policy_curve[t];
  }
  rep.best_mean = coa_energy > 0.0 ? coa_reward / coa_energy : 0.0;

  const PerArm<double> c = costs.reward_arms();
  const double c_max = *std::max_element(c.begin(), c.end());
  const double c_min = *std::min_element(c.begin(), c.end());
  std::vector<double> deltas;
  for (std::size_t j = 0; j < kRewardArms; ++j) {
    rep.arm_means[j] = energy[j] > 0.0 ? reward[j] / energy[j] : 0.0;
    rep.deltas[j] = rep.best_mean - rep.arm_means[j];
    rep.mean_pulls[j] = pulls[j] / trials;
    if (rep.deltas[j] > 0.0) {
      deltas.push_back(rep.deltas[j]);
      rep.pull_bounds[j] =
          pull_count_bound(rep.deltas[j], c_max, c_min, exploration,
                           std::max(1.0, rep.usable_slots.back()), false);
    }
  }
  if (!deltas.empty()) {
    rep.bound.resize(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
      rep.bound[t] = regret_bound(deltas, rep.best_mean, c_max, c_min,
                                  exploration, rep.usable_slots[t]);
    }
  }
  return rep;
}

namespace {

std::size_t policy_slot(const std::vector<PolicyKind>& policies,
                        PolicyKind kind) {
  for (std::size_t i = 0; i < policies.size(); ++i) {
    if (policies[i] == kind) return i;
  }
  return policies.size();
}

void run_single(const ExperimentConfig& c, ExperimentSummary& s) {
  const auto trace = trace_for(c);
  const NodeParams params = node_params(c);
  s.cumulative.assign(c.policies.size(), std::vector<double>(c.horizon, 0.0));
  for (std::size_t k = 0; k < c.trials; ++k) {
    SingleTrial trial;
    trial.trial = k;
    trial.seed = trial_seed(c, k);
    const EpisodeInputs inputs = inputs_with(c, trial.seed, 0, &trace);
    for (std::size_t p = 0; p < c.policies.size(); ++p) {
      const PolicyKind kind = c.policies[p];
      NodeParams effective = params;
      if (kind == PolicyKind::kCoa) effective.efficiency = 1.0;
      std::unique_ptr<Policy> policy;
      if (kind == PolicyKind::kCoa) {
        CoaOptions opt;
        opt.process_cost = params.costs.sample;
        opt.capacity = params.capacity;
        opt.initial_energy = params.initial_energy;
        opt.efficiency = 1.0;
        opt.quantum = c.coa_quantum;
        policy = std::make_unique<CoaPolicy>(
            coa_schedule(inputs.harvest, inputs.voi, opt));
      } else {
        policy = make_policy(kind, effective, inputs,
                             stream_seed(trial.seed, kPolicyStream));
      }
      trial.logs.push_back(run_node_episode(*policy, effective, inputs));
      for (std::size_t t = 0; t < c.horizon; ++t) {
        s.cumulative[p][t] += trial.logs.back()[t].cumulative_voi /
                              static_cast<double>(c.trials);
      }
    }
    s.single.push_back(std::move(trial));
  }
}

void run_network(const ExperimentConfig& c, ExperimentSummary& s) {
  NetworkOptions opt;
  opt.node = node_params(c);
  opt.coa_quantum = c.coa_quantum;
  // (policy, neighbour count) -> {nodes, awake, common, slots}
  struct Acc {
    std::size_t nodes = 0;
    double awake = 0.0;
    double common = 0.0;
    double neighbor_awake = 0.0;
  };
  std::map<std::pair<std::size_t, std::size_t>, Acc> groups;
  const double horizon = static_cast<double>(c.horizon);

  for (std::size_t n : c.node_counts) {
    DensityRow row;
    row.nodes = n;
    row.sink_voi_per_node.assign(c.policies.size(), 0.0);
    row.node_voi.assign(c.policies.size(), 0.0);
    for (std::size_t k = 0; k < c.trials; ++k) {
      NetworkTrial trial;
      trial.nodes = n;
      trial.trial = k;
      trial.seed = splitmix64(trial_seed(c, k) * 0x10001ULL + n);
      std::mt19937_64 place(stream_seed(trial.seed, kTopologyStream));
      trial.topology = random_topology(n, c.area, c.area, c.radius, place);
      std::vector<EpisodeInputs> inputs(trial.topology.size());
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (i != trial.topology.sink) {
          inputs[i] = inputs_with(c, trial.seed, i, nullptr);
        }
      }
      for (std::size_t p = 0; p < c.policies.size(); ++p) {
        NetworkEpisode ep = run_network_episode(
            c.policies[p], trial.topology, opt, inputs,
            stream_seed(trial.seed, kPolicyStream));
        double sink = 0.0;
        for (const NetworkSlotRecord& r : ep.slots) sink += r.sink_voi;
        row.sink_voi_per_node[p] +=
            sink / static_cast<double>(n) / static_cast<double>(c.trials);
        double node_sum = 0.0;
        for (double v : ep.node_voi) node_sum += v;
        row.node_voi[p] +=
            node_sum / static_cast<double>(n) / static_cast<double>(c.trials);

        const Topology& topo = trial.topology;
        for (std::size_t i = 0; i < topo.size(); ++i) {
          if (i == topo.sink) continue;
          std::size_t k_nb = 0;
          double nb_awake = 0.0;
          for (std::size_t v : topo.neighbors[i]) {
            if (v == topo.sink) continue;
            ++k_nb;
            nb_awake += static_cast<double>(ep.awake_slots[v]) / horizon;
          }
          if (k_nb == 0) continue;
          Acc& a = groups[{p, k_nb}];
          ++a.nodes;
          a.awake += static_cast<double>(ep.awake_slots[i]) / horizon;
          a.common += static_cast<double>(ep.common_slots[i]) / horizon;
          a.neighbor_awake += nb_awake / static_cast<double>(k_nb);
        }
        trial.episodes.push_back(std::move(ep));
      }
      s.network.push_back(std::move(trial));
    }
    s.density.push_back(std::move(row));
  }
  for (const auto& [key, a] : groups) {
    const double nodes = static_cast<double>(a.nodes);
    CommonActivityRow r;
    r.policy = c.policies[key.first];
    r.neighbors = key.second;
    r.nodes = a.nodes;
    r.empirical = a.common / nodes;
    r.closed_form = common_active_probability(a.awake / nodes,
                                              a.neighbor_awake / nodes,
                                              key.second);
    s.common_activity.push_back(r);
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

std::string slot_log_csv(const std::vector<SlotLog>& logs) {
  std::ostringstream os;
  os << "slot,arm,idle,harvest,solar,energy_direct,energy_battery,"
        "energy_stored,energy_wasted,reward,threshold,backlog_voi,battery,"
        "cumulative_voi\n";
  for (const SlotLog& l : logs) {
    os << l.slot << ',' << arm_name(l.arm) << ',' << (l.idle ? 1 : 0) << ','
       << fmt(l.harvest) << ',' << (l.solar ? 1 : 0) << ','
       << fmt(l.energy_direct) << ',' << fmt(l.energy_battery) << ','
       << fmt(l.energy_stored) << ',' << fmt(l.energy_wasted) << ','
       << fmt(l.reward) << ',' << fmt(l.threshold) << ','
       << fmt(l.backlog_voi) << ',' << fmt(l.battery) << ','
       << fmt(l.cumulative_voi) << '\n';
  }
  return os.str();
}

std::string network_log_csv(const NetworkEpisode& ep) {
  std::ostringstream os;
  os << "slot,sink_voi,sampled_voi,backlog_voi,transfers,collisions,awake,"
        "common_awake\n";
  for (const NetworkSlotRecord& r : ep.slots) {
    os << r.slot << ',' << fmt(r.sink_voi) << ',' << fmt(r.sampled_voi) << ','
       << fmt(r.backlog_voi) << ',' << r.transfers << ',' << r.collisions
       << ',' << r.awake << ',' << r.common_awake << '\n';
  }
  return os.str();
}

double energy_of(const std::vector<SlotLog>& logs) {
  double e = 0.0;
  for (const SlotLog& l : logs) e += l.energy_spent();
  return e;
}

double total_of(const std::vector<SlotLog>& logs) {
  return logs.empty() ? 0.0 : logs.back().cumulative_voi;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  ExperimentSummary s;
  s.policies = config.policies;
  s.horizon = config.horizon;
  if (config.scenario == Scenario::kSingleNode) {
    run_single(config, s);
  } else {
    run_network(config, s);
  }
  return s;
}

std::string summary_csv(const ExperimentSummary& s) {
  std::ostringstream os;
  const std::size_t coa = policy_slot(s.policies, PolicyKind::kCoa);
  if (!s.network.empty()) {
    os << "nodes,trial,seed";
    for (PolicyKind p : s.policies) {
      const std::string n(policy_name(p));
      os << ',' << n << "_sink_voi," << n << "_node_voi," << n << "_awake,"
         << n << "_common";
    }
    os << '\n';
    for (const NetworkTrial& t : s.network) {
      os << t.nodes << ',' << t.trial << ',' << t.seed;
      const double slots = static_cast<double>(s.horizon * t.nodes);
      for (const NetworkEpisode& ep : t.episodes) {
        double sink = 0.0;
        std::size_t awake = 0, common = 0;
        for (const NetworkSlotRecord& r : ep.slots) {
          sink += r.sink_voi;
          awake += r.awake;
          common += r.common_awake;
        }
        os << ',' << fmt(sink) << ',' << fmt(ep.mean_node_voi()) << ','
           << fmt(static_cast<double>(awake) / slots) << ','
           << fmt(static_cast<double>(common) / slots);
      }
      os << '\n';
    }
    return os.str();
  }
  os << "trial,seed";
  for (PolicyKind p : s.policies) {
    const std::string n(policy_name(p));
    os << ',' << n << "_voi," << n << "_energy," << n << "_efficiency";
  }
  if (coa < s.policies.size()) {
    for (PolicyKind p : s.policies) {
      if (p != PolicyKind::kCoa) os << ",regret_" << policy_name(p);
    }
  }
  os << '\n';
  for (const SingleTrial& t : s.single) {
    os << t.trial << ',' << t.seed;
    for (const auto& logs : t.logs) {
      const double v = total_of(logs);
      const double e = energy_of(logs);
      os << ',' << fmt(v) << ',' << fmt(e) << ','
         << fmt(e > 0.0 ? v / e : 0.0);
    }
    if (coa < s.policies.size()) {
      for (std::size_t p = 0; p < s.policies.size(); ++p) {
        if (p == coa) continue;
        os << ',' << fmt(total_of(t.logs[coa]) - total_of(t.logs[p]));
      }
    }
    os << '\n';
  }
  return os.str();
}

void emit_plot_data(const ExperimentSummary& s,
                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ostringstream os;
    os << "slot";
    for (PolicyKind p : s.policies) os << ',' << policy_name(p);
    os << '\n';
    if (!s.single.empty()) {
      for (std::size_t t = 0; t < s.horizon; ++t) {
        os << t;
        for (const auto& curve : s.cumulative) os << ',' << fmt(curve[t]);
        os << '\n';
      }
    }
    write_file(dir / "cumulative_voi.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "nodes";
    for (PolicyKind p : s.policies) os << ',' << policy_name(p);
    for (PolicyKind p : s.policies) os << ',' << policy_name(p) << "_node_voi";
    os << '\n';
    for (const DensityRow& r : s.density) {
      os << r.nodes;
      for (double v : r.sink_voi_per_node) os << ',' << fmt(v);
      for (double v : r.node_voi) os << ',' << fmt(v);
      os << '\n';
    }
    write_file(dir / "voi_vs_density.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "policy,neighbors,nodes,empirical,closed_form\n";
    for (const CommonActivityRow& r : s.common_activity) {
      os << policy_name(r.policy) << ',' << r.neighbors << ',' << r.nodes
         << ',' << fmt(r.empirical) << ',' << fmt(r.closed_form) << '\n';
    }
    write_file(dir / "common_activity.csv", os.str());
  }
}

std::filesystem::path output_directory(const ExperimentConfig& config) {
  if (const char* env = std::getenv("ODC_OUTPUT_DIR"); env && *env) {
    return std::filesystem::path(env) / config.name;
  }
  return config.output_dir;
}

std::filesystem::path write_outputs(const ExperimentConfig& config,
                                    const ExperimentSummary& s) {
  const std::filesystem::path dir = output_directory(config);
  std::filesystem::create_directories(dir);
  if (config.write_slot_logs) {
    const std::filesystem::path logs = dir / "slots";
    std::filesystem::create_directories(logs);
    for (const SingleTrial& t : s.single) {
      for (std::size_t p = 0; p < s.policies.size(); ++p) {
        write_file(logs / ("trial_" + std::to_string(t.trial) + "_" +
                           std::string(policy_name(s.policies[p])) + ".csv"),
                   slot_log_csv(t.logs[p]));
      }
    }
    for (const NetworkTrial& t : s.network) {
      for (std::size_t p = 0; p < s.policies.size(); ++p) {
        write_file(logs / ("nodes_" + std::to_string(t.nodes) + "_trial_" +
                           std::to_string(t.trial) + "_" +
                           std::string(policy_name(s.policies[p])) + ".csv"),
                   network_log_csv(t.episodes[p]));
      }
    }
  }
  write_file(dir / "summary.csv", summary_csv(s));

  if (!s.single.empty()) {
    const double trials = static_cast<double>(s.single.size());
    const std::size_t coa = policy_slot(s.policies, PolicyKind::kCoa);
    std::ostringstream pol;
    pol << "policy,mean_voi,mean_energy,efficiency,mean_regret\n";
    for (std::size_t p = 0; p < s.policies.size(); ++p) {
      double v = 0.0, e = 0.0, r = 0.0;
      for (const SingleTrial& t : s.single) {
        v += total_of(t.logs[p]);
        e += energy_of(t.logs[p]);
        if (coa < s.policies.size()) {
          r += total_of(t.logs[coa]) - total_of(t.logs[p]);
        }
      }
      pol << policy_name(s.policies[p]) << ',' << fmt(v / trials) << ','
          << fmt(e / trials) << ',' << fmt(e > 0.0 ? v / e : 0.0) << ','
          << fmt(r / trials) << '\n';
    }
    write_file(dir / "policies.csv", pol.str());

    if (coa < s.policies.size()) {
      std::vector<std::vector<SlotLog>> coa_logs;
      for (const SingleTrial& t : s.single) coa_logs.push_back(t.logs[coa]);
      std::vector<RegretReport> reports;
      std::vector<PolicyKind> names;
      for (std::size_t p = 0; p < s.policies.size(); ++p) {
        if (p == coa) continue;
        std::vector<std::vector<SlotLog>> logs;
        for (const SingleTrial& t : s.single) logs.push_back(t.logs[p]);
        reports.push_back(compute_regret(logs, coa_logs, config.node.costs,
                                         config.node.exploration));
        names.push_back(s.policies[p]);
      }
      std::ostringstream os;
      os << "slot";
      for (PolicyKind p : names) {
        os << ",regret_" << policy_name(p) << ",bound_" << policy_name(p);
      }
      os << '\n';
      for (std::size_t t = 0; t < s.horizon; ++t) {
        os << t;
        for (const RegretReport& r : reports) {
          os << ',' << fmt(r.regret[t]) << ','
             << (r.bound.empty() ? std::string() : fmt(r.bound[t]));
        }
        os << '\n';
      }
      write_file(dir / "regret.csv", os.str());
    }
  }
  emit_plot_data(s, dir);
  return dir;
}

}  // namespace odc
