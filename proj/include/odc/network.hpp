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


#ifndef ODC_NETWORK_HPP_
#define ODC_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "odc/bandit.hpp"
#include "odc/schedulers.hpp"

namespace odc {

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

struct Topology {
  std::vector<Position> positions;
  std::size_t sink = 0;
  double radius = 0.0;
  std::vector<std::size_t> parent;  // kNoParent for the sink
  std::vector<std::size_t> layer;   // hop count, 0 for the sink
  std::vector<std::vector<std::size_t>> neighbors;
  std::vector<std::vector<std::size_t>> children;
  std::vector<std::vector<std::size_t>> layers;  // layers[k] = nodes k hops out

  std::size_t size() const { return positions.size(); }
  std::size_t depth() const { return layers.empty() ? 0 : layers.size() - 1; }
};

Topology build_layers(std::vector<Position> positions, double radius,
                      std::size_t sink);

// Rows `node,x,y,layer,parent`; the sink's parent column is empty.
void write_topology_csv(std::ostream& out, const Topology& topo);

// Reads `node,x,y` rows (extra columns ignored). Node ids must be dense.
std::vector<Position> read_positions_csv(std::istream& in);

// Uniform placement in a `width` x `height` area with the sink at the centre
// as node 0. Redraws until the layout is connected.
Topology random_topology(std::size_t sensor_count, double width, double height,
                         double radius, std::mt19937_64& rng);

struct NodeAction {
  Arm arm = Arm::kStore;
  bool has_packet = false;
  double packet_voi = 0.0;  // top of the backlog when transmitting
};

struct Transfer {
  std::size_t sender = 0;
  std::size_t receiver = 0;
  double voi = 0.0;
};

struct SlotResolution {
  std::vector<Transfer> transfers;
  std::vector<std::size_t> collisions;  // lost contention for a listening parent
  std::vector<std::size_t> unheard;     // parent was not receiving
  double sink_voi = 0.0;
};

SlotResolution resolve_slot(const Topology& topo,
                            std::span<const NodeAction> actions,
                            std::mt19937_64& rng);

double common_active_probability(double p_self, double p_neighbor,
                                 std::size_t neighbor_count);

struct NetworkSlotRecord {
  std::size_t slot = 0;
  double sink_voi = 0.0;
  double sampled_voi = 0.0;    // sampled network-wide this slot
  double backlog_voi = 0.0;    // network-wide backlog at the end of the slot
  std::vector<double> sent_by_layer;      // successful transfers out of layer k
  std::vector<double> received_by_layer;  // arrivals into layer k, 0 = sink
  std::size_t transfers = 0;
  std::size_t collisions = 0;
  std::size_t awake = 0;
  std::size_t common_awake = 0;  // awake with at least one awake neighbour
  bool half_duplex = true;
};

struct NetworkEpisode {
  std::vector<NetworkSlotRecord> slots;
  std::vector<double> node_voi;  // cumulative bandit reward per node
  std::vector<std::size_t> awake_slots;
  std::vector<std::size_t> common_slots;
  double energy_spent = 0.0;

  double mean_node_voi() const;
};

struct NetworkOptions {
  NodeParams node;
  double coa_quantum = 1.0;
};

// `inputs` is indexed by node id; the sink's entry is ignored.
NetworkEpisode run_network_episode(PolicyKind kind, const Topology& topo,
                                   const NetworkOptions& options,
                                   std::span<const EpisodeInputs> inputs,
                                   std::uint64_t seed);

struct SinkAccount {
  double total = 0.0;
  // flows[t][k]: {received by layer k, sent by layer k + 1}
  std::vector<std::vector<std::pair<double, double>>> flows;
  bool layer_identity = true;
};

SinkAccount sink_accounting(std::span<const NetworkSlotRecord> records,
                            double tolerance = 1e-9);

}  // namespace odc

#endif  // ODC_NETWORK_HPP_
