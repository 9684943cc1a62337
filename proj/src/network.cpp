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


#include "odc/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

namespace odc {

namespace {

double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Topology build_layers(std::vector<Position> positions, double radius,
                      std::size_t sink) {
  const std::size_t n = positions.size();
  if (sink >= n) throw TopologyError("sink id out of range");
  if (!(radius > 0.0)) throw TopologyError("radius must be positive");

  Topology topo;
  topo.positions = std::move(positions);
  topo.sink = sink;
  topo.radius = radius;
  topo.neighbors.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(topo.positions[i], topo.positions[j]) <= radius) {
        topo.neighbors[i].push_back(j);
        topo.neighbors[j].push_back(i);
      }
    }
  }

  topo.layer.assign(n, kNoParent);
  topo.parent.assign(n, kNoParent);
  topo.layer[sink] = 0;
  std::deque<std::size_t> queue{sink};
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : topo.neighbors[u]) {
      if (topo.layer[v] != kNoParent) continue;
      topo.layer[v] = topo.layer[u] + 1;
      queue.push_back(v);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (topo.layer[i] == kNoParent) {
      throw TopologyError("node " + std::to_string(i) +
                          " has no route to the sink");
    }
  }
  // Neighbour lists are sorted, so the first closer neighbour has the
  // lowest id.
  for (std::size_t i = 0; i < n; ++i) {
    if (i == sink) continue;
    for (std::size_t v : topo.neighbors[i]) {
      if (topo.layer[v] + 1 == topo.layer[i]) {
        topo.parent[i] = v;
        break;
      }
    }
  }

  topo.children.assign(n, {});
  std::size_t depth = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != sink) topo.children[topo.parent[i]].push_back(i);
    depth = std::max(depth, topo.layer[i]);
  }
  topo.layers.assign(depth + 1, {});
  for (std::size_t i = 0; i < n; ++i) topo.layers[topo.layer[i]].push_back(i);
  return topo;
}

void write_topology_csv(std::ostream& out, const Topology& topo) {
  out << "node,x,y,layer,parent\n";
  for (std::size_t i = 0; i < topo.size(); ++i) {
    out << i << ',' << topo.positions[i].x << ',' << topo.positions[i].y
        << ',' << topo.layer[i] << ',';
    if (topo.parent[i] != kNoParent) out << topo.parent[i];
    out << '\n';
  }
}

std::vector<Position> read_positions_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw TopologyError("empty topology file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw TopologyError("topology file missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_node = column("node");
  const std::size_t c_x = column("x");
  const std::size_t c_y = column("y");

  std::vector<Position> positions;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    const std::size_t need = std::max({c_node, c_x, c_y}) + 1;
    if (cells.size() < need) {
      throw TopologyError("row " + std::to_string(row) + ": too few columns");
    }
    try {
      const std::size_t id = std::stoul(cells[c_node]);
      if (id != positions.size()) {
        throw TopologyError("row " + std::to_string(row) + ": expected node " +
                            std::to_string(positions.size()));
      }
      positions.push_back({std::stod(cells[c_x]), std::stod(cells[c_y])});
    } catch (const std::logic_error&) {
      throw TopologyError("row " + std::to_string(row) + ": malformed number");
    }
  }
  return positions;
}

Topology random_topology(std::size_t sensor_count, double width, double height,
                         double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(0.0, width);
  std::uniform_real_distribution<double> uy(0.0, height);
  constexpr int kAttempts = 1000;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<Position> pos;
    pos.reserve(sensor_count + 1);
    pos.push_back({width / 2.0, height / 2.0});
    for (std::size_t i = 0; i < sensor_count; ++i) {
      const double x = ux(rng);
      pos.push_back({x, uy(rng)});
    }
    try {
      return build_layers(std::move(pos), radius, 0);
    } catch (const TopologyError&) {
    }
  }
  throw TopologyError("no connected layout found");
}

SlotResolution resolve_slot(const Topology& topo,
                            std::span<const NodeAction> actions,
                            std::mt19937_64& rng) {
  if (actions.size() != topo.size()) {
    throw TopologyError("one action per node required");
  }
  SlotResolution res;
  std::vector<std::vector<std::size_t>> contenders(topo.size());
  for (std::size_t i = 0; i < topo.size(); ++i) {
    if (i == topo.sink) continue;
    const NodeAction& a = actions[i];
    if (a.arm != Arm::kTransmit || !a.has_packet) continue;
    const std::size_t p = topo.parent[i];
    if (p == topo.sink || actions[p].arm == Arm::kReceive) {
      contenders[p].push_back(i);
    } else {
      res.unheard.push_back(i);
    }
  }
  for (std::size_t p = 0; p < topo.size(); ++p) {
    const auto& group = contenders[p];
    if (group.empty()) continue;
    std::size_t winner = 0;
    if (group.size() > 1) {
      std::uniform_int_distribution<std::size_t> pick(0, group.size() - 1);
      winner = pick(rng);
    }
    for (std::size_t k = 0; k < group.size(); ++k) {
      if (k != winner) res.collisions.push_back(group[k]);
    }
    const std::size_t s = group[winner];
    res.transfers.push_back({s, p, actions[s].packet_voi});
    if (p == topo.sink) res.sink_voi += actions[s].packet_voi;
  }
  return res;
}

double common_active_probability(double p_self, double p_neighbor,
                                 std::size_t neighbor_count) {
  if (p_self < 0.0 || p_self > 1.0 || p_neighbor < 0.0 || p_neighbor > 1.0) {
    throw std::invalid_argument("probabilities must lie in [0, 1]");
  }
  if (neighbor_count == 0) throw std::invalid_argument("need a neighbour");
  return p_self *
         (1.0 - std::pow(1.0 - p_neighbor, static_cast<double>(neighbor_count)));
}

double NetworkEpisode::mean_node_voi() const {
  if (node_voi.empty()) return 0.0;
  double s = 0.0;
  for (double v : node_voi) s += v;
  return s / static_cast<double>(node_voi.size());
}

namespace {

// Offline coordinator: per-node COA plans pick the sampling slots, and the
// remaining slots pair one child with its parent per receiver, nearest
// layers first.
class CoaCoordinator {
 public:
  CoaCoordinator(const Topology& topo, const NodeParams& params,
                 double quantum, std::span<const EpisodeInputs> inputs)
      : topo_(topo), plans_(topo.size()) {
    CoaOptions opt;
    opt.process_cost = params.costs.sample;
    opt.capacity = params.capacity;
    opt.initial_energy = params.initial_energy;
    opt.efficiency = params.efficiency;
    opt.quantum = quantum;
    for (std::size_t i = 0; i < topo.size(); ++i) {
      if (i == topo.sink) continue;
      plans_[i] = coa_schedule(inputs[i].harvest, inputs[i].voi, opt).actions;
    }
    order_.reserve(topo.size());
    for (const auto& layer : topo.layers) {
      for (std::size_t i : layer) {
        if (i != topo.sink) order_.push_back(i);
      }
    }
  }

  std::vector<Choice> Decide(std::size_t slot,
                             std::span<const NodeView> views) const {
    const std::size_t n = topo_.size();
    std::vector<Choice> out(n);
    std::vector<bool> decided(n, false);
    std::vector<bool> listening(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == topo_.sink) continue;
      const CoaAction a = plans_[i][slot];
      if (a == CoaAction::kProcess && views[i].Affordable(Arm::kSample)) {
        out[i].arm = Arm::kSample;
        decided[i] = true;
      } else {
        out[i].arm = Arm::kStore;
        out[i].idle = a == CoaAction::kIdle;
      }
    }
    for (std::size_t i : order_) {
      if (decided[i] || views[i].backlog->empty() ||
          !views[i].Affordable(Arm::kTransmit)) {
        continue;
      }
      const std::size_t p = topo_.parent[i];
      if (listening[p]) continue;
      if (p != topo_.sink &&
          (decided[p] || !views[p].Affordable(Arm::kReceive))) {
        continue;
      }
      out[i] = Choice{Arm::kTransmit, 0.0, false};
      decided[i] = true;
      listening[p] = true;
      if (p != topo_.sink) {
        out[p] = Choice{Arm::kReceive, 0.0, false};
        decided[p] = true;
      }
    }
    return out;
  }

 private:
  const Topology& topo_;
  std::vector<std::vector<CoaAction>> plans_;
  std::vector<std::size_t> order_;
};

}  // namespace

NetworkEpisode run_network_episode(PolicyKind kind, const Topology& topo,
                                   const NetworkOptions& options,
                                   std::span<const EpisodeInputs> inputs,
                                   std::uint64_t seed) {
  const std::size_t n = topo.size();
  if (inputs.size() != n) {
    throw ModelError("network needs one input stream per node");
  }
  std::size_t horizon = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == topo.sink) continue;
    if (horizon == 0) horizon = inputs[i].harvest.size();
    if (inputs[i].harvest.size() != horizon ||
        inputs[i].voi.size() < horizon) {
      throw ModelError("node " + std::to_string(i) +
                       " input streams do not cover the horizon");
    }
  }

  NodeParams params = options.node;
  if (kind == PolicyKind::kCoa) params.efficiency = 1.0;

  std::vector<std::unique_ptr<NodeRuntime>> nodes(n);
  std::vector<std::unique_ptr<Policy>> policies(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == topo.sink) continue;
    nodes[i] = std::make_unique<NodeRuntime>(params);
    if (kind != PolicyKind::kCoa) {
      policies[i] = make_policy(kind, params, inputs[i],
                                splitmix64(seed ^ (i * 0x100000001b3ULL)),
                                !topo.children[i].empty());
    }
  }
  std::optional<CoaCoordinator> coordinator;
  if (kind == PolicyKind::kCoa) {
    coordinator.emplace(topo, params, options.coa_quantum, inputs);
  }
  std::mt19937_64 channel(splitmix64(seed));

  NetworkEpisode ep;
  ep.node_voi.assign(n, 0.0);
  ep.awake_slots.assign(n, 0);
  ep.common_slots.assign(n, 0);
  ep.slots.reserve(horizon);

  std::vector<NodeView> views(n);
  std::vector<Choice> choices(n);
  std::vector<NodeRuntime::Pending> pending(n);
  std::vector<NodeAction> actions(n);
  std::vector<bool> awake(n, false);
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == topo.sink) continue;
      views[i] = nodes[i]->View(t, inputs[i].harvest[t], inputs[i].voi[t],
                                !topo.children[i].empty());
    }
    if (coordinator) {
      choices = coordinator->Decide(t, views);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (i != topo.sink) choices[i] = policies[i]->Choose(views[i]);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == topo.sink) continue;
      pending[i] = nodes[i]->Begin(views[i], choices[i]);
      actions[i].arm = pending[i].log.arm;
      actions[i].has_packet = !nodes[i]->backlog().empty();
      actions[i].packet_voi = nodes[i]->OfferedVoi(pending[i]);
      awake[i] = actions[i].arm != Arm::kStore;
    }
    const SlotResolution res = resolve_slot(topo, actions, channel);

    NetworkSlotRecord rec;
    rec.slot = t;
    rec.sink_voi = res.sink_voi;
    rec.transfers = res.transfers.size();
    rec.collisions = res.collisions.size();
    rec.sent_by_layer.assign(topo.depth() + 1, 0.0);
    rec.received_by_layer.assign(topo.depth() + 1, 0.0);
    std::vector<std::optional<double>> received(n);
    std::vector<bool> sent(n, false);
    for (const Transfer& tr : res.transfers) {
      if (tr.receiver != topo.sink) received[tr.receiver] = tr.voi;
      sent[tr.sender] = true;
      rec.sent_by_layer[topo.layer[tr.sender]] += tr.voi;
      rec.received_by_layer[topo.layer[tr.receiver]] += tr.voi;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == topo.sink) continue;
      const bool sending = actions[i].arm == Arm::kTransmit && sent[i];
      if (sending && received[i]) rec.half_duplex = false;
      SlotLog log = nodes[i]->Finish(std::move(pending[i]), inputs[i].voi[t],
                                     received[i], sent[i]);
      if (policies[i]) policies[i]->Observe(log);
      if (log.arm == Arm::kSample) rec.sampled_voi += log.reward;
      rec.backlog_voi += log.backlog_voi;
      ep.node_voi[i] = log.cumulative_voi;
      ep.energy_spent += log.energy_spent();
      if (awake[i]) {
        ++rec.awake;
        ++ep.awake_slots[i];
        for (std::size_t v : topo.neighbors[i]) {
          if (v != topo.sink && awake[v]) {
            ++rec.common_awake;
            ++ep.common_slots[i];
            break;
          }
        }
      }
    }
    ep.slots.push_back(std::move(rec));
  }
  return ep;
}

SinkAccount sink_accounting(std::span<const NetworkSlotRecord> records,
                            double tolerance) {
  SinkAccount acc;
  acc.flows.reserve(records.size());
  for (const NetworkSlotRecord& r : records) {
    acc.total += r.sink_voi;
    std::vector<std::pair<double, double>> row;
    for (std::size_t k = 0; k < r.received_by_layer.size(); ++k) {
      const double in = r.received_by_layer[k];
      const double out =
          k + 1 < r.sent_by_layer.size() ? r.sent_by_layer[k + 1] : 0.0;
      row.emplace_back(in, out);
      if (std::abs(in - out) > tolerance) acc.layer_identity = false;
    }
    if (!r.received_by_layer.empty() &&
        std::abs(r.received_by_layer[0] - r.sink_voi) > tolerance) {
      acc.layer_identity = false;
    }
    acc.flows.push_back(std::move(row));
  }
  return acc;
}

}  // namespace odc
