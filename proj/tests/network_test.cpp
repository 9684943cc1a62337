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

#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <random>
#include <sstream>

namespace odc {
namespace {

TEST(BuildLayers, SingleNodeInRange) {
  const Topology t = build_layers({{0, 0}, {10, 0}}, 50.0, 0);
  ASSERT_EQ(t.layers.size(), 2u);
  EXPECT_EQ(t.layers[1], std::vector<std::size_t>{1});
  EXPECT_EQ(t.parent[1], 0u);
  EXPECT_EQ(t.parent[0], kNoParent);
}

TEST(BuildLayers, Chain) {
  const Topology t = build_layers({{0, 0}, {40, 0}, {80, 0}, {120, 0}}, 50.0, 0);
  ASSERT_EQ(t.depth(), 3u);
  for (std::size_t k = 1; k <= 3; ++k) {
    EXPECT_EQ(t.layers[k], std::vector<std::size_t>{k});
    EXPECT_EQ(t.parent[k], k - 1);
  }
  EXPECT_EQ(t.children[1], std::vector<std::size_t>{2});
}

TEST(BuildLayers, DisconnectedNodeIsNamed) {
  try {
    build_layers({{0, 0}, {10, 0}, {500, 500}}, 50.0, 0);
    FAIL() << "expected a topology error";
  } catch (const TopologyError& e) {
    EXPECT_NE(std::string(e.what()).find("node 2"), std::string::npos);
  }
}

TEST(BuildLayers, TieBreaksOnLowestId) {
  // Nodes 1 and 2 are both one hop out; node 3 reaches both.
  const Topology u = build_layers({{0, 0}, {40, 30}, {40, -30}, {80, 0}}, 50.0, 0);
  EXPECT_EQ(u.layer[3], 2u);
  EXPECT_EQ(u.parent[3], 1u);
}

// Hop counts by repeated relaxation over an adjacency matrix.
std::vector<std::size_t> relaxed_hops(const std::vector<Position>& pos,
                                      double radius, std::size_t sink) {
  const std::size_t n = pos.size();
  const std::size_t inf = n + 1;
  std::vector<std::size_t> hops(n, inf);
  hops[sink] = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double dx = pos[i].x - pos[j].x, dy = pos[i].y - pos[j].y;
        if (i == j || std::sqrt(dx * dx + dy * dy) > radius) continue;
        if (hops[j] != inf && hops[j] + 1 < hops[i]) {
          hops[i] = hops[j] + 1;
          changed = true;
        }
      }
    }
  }
  return hops;
}

TEST(BuildLayers, MatchesIndependentHopCount) {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 20; ++trial) {
    const Topology t = random_topology(50, 100.0, 100.0, 50.0, rng);
    const auto hops = relaxed_hops(t.positions, 50.0, t.sink);
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_EQ(t.layer[i], hops[i]);
      if (i != t.sink) EXPECT_EQ(t.layer[t.parent[i]] + 1, t.layer[i]);
    }
    std::size_t covered = 0;
    for (const auto& l : t.layers) covered += l.size();
    EXPECT_EQ(covered, t.size());
  }
}

TEST(TopologyCsv, RoundTrip) {
  const Topology t = build_layers({{0, 0}, {40, 0}, {80, 0}}, 50.0, 0);
  std::ostringstream out;
  write_topology_csv(out, t);
  EXPECT_EQ(out.str(),
            "node,x,y,layer,parent\n0,0,0,0,\n1,40,0,1,0\n2,80,0,2,1\n");
  std::istringstream in(out.str());
  const auto pos = read_positions_csv(in);
  ASSERT_EQ(pos.size(), 3u);
  EXPECT_EQ(pos[2].x, 80.0);
  std::istringstream bad("node,x\n0,1\n");
  EXPECT_THROW(read_positions_csv(bad), TopologyError);
}

std::vector<NodeAction> idle(std::size_t n) {
  return std::vector<NodeAction>(n);
}

TEST(ResolveSlot, ParentMustListen) {
  const Topology t = build_layers({{0, 0}, {40, 0}, {80, 0}}, 50.0, 0);
  std::mt19937_64 rng(1);
  auto a = idle(3);
  a[2] = {Arm::kTransmit, true, 4.0};
  a[1] = {Arm::kStore, false, 0.0};
  SlotResolution r = resolve_slot(t, a, rng);
  EXPECT_TRUE(r.transfers.empty());
  EXPECT_EQ(r.unheard, std::vector<std::size_t>{2});
  a[1].arm = Arm::kReceive;
  r = resolve_slot(t, a, rng);
  ASSERT_EQ(r.transfers.size(), 1u);
  EXPECT_EQ(r.transfers[0].receiver, 1u);
  EXPECT_EQ(r.sink_voi, 0.0);
}

TEST(ResolveSlot, SinkAlwaysListensOneWinner) {
  const Topology t = build_layers({{0, 0}, {10, 0}, {-10, 0}}, 50.0, 0);
  auto a = idle(3);
  a[1] = {Arm::kTransmit, true, 3.0};
  std::mt19937_64 rng(2);
  SlotResolution r = resolve_slot(t, a, rng);
  EXPECT_EQ(r.sink_voi, 3.0);
  a[2] = {Arm::kTransmit, true, 5.0};
  int first = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    r = resolve_slot(t, a, rng);
    ASSERT_EQ(r.transfers.size(), 1u);
    ASSERT_EQ(r.collisions.size(), 1u);
    if (r.transfers[0].sender == 1) ++first;
  }
  EXPECT_NEAR(first / double(draws), 0.5, 0.02);
}

TEST(ResolveSlot, EmptyBacklogSendsNothing) {
  const Topology t = build_layers({{0, 0}, {10, 0}}, 50.0, 0);
  auto a = idle(2);
  a[1] = {Arm::kTransmit, false, 0.0};
  std::mt19937_64 rng(3);
  EXPECT_TRUE(resolve_slot(t, a, rng).transfers.empty());
}

TEST(CommonActivity, ClosedForm) {
  EXPECT_EQ(common_active_probability(0.0, 0.7, 3), 0.0);
  EXPECT_EQ(common_active_probability(1.0, 1.0, 1), 1.0);
  EXPECT_DOUBLE_EQ(common_active_probability(0.5, 0.5, 2), 0.375);
  EXPECT_THROW(common_active_probability(1.2, 0.5, 2), std::invalid_argument);
  EXPECT_THROW(common_active_probability(0.5, 0.5, 0), std::invalid_argument);
}

TEST(CommonActivity, MonteCarloAgrees) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double ps : {0.1, 0.5, 0.9}) {
    for (double pn : {0.05, 0.3, 0.7}) {
      for (std::size_t k : {1u, 3u, 8u}) {
        int hits = 0;
        const int slots = 100000;
        for (int s = 0; s < slots; ++s) {
          if (u(rng) >= ps) continue;
          bool any = false;
          for (std::size_t j = 0; j < k; ++j) any |= u(rng) < pn;
          hits += any;
        }
        EXPECT_NEAR(hits / double(slots), common_active_probability(ps, pn, k),
                    0.02);
      }
    }
  }
}

TEST(SinkAccounting, Examples) {
  EXPECT_EQ(sink_accounting({}).total, 0.0);
  NetworkSlotRecord r;
  r.sink_voi = 7.0;
  r.sent_by_layer = {0.0, 7.0};
  r.received_by_layer = {7.0, 0.0};
  const std::vector<NetworkSlotRecord> one{r};
  const SinkAccount acc = sink_accounting(one);
  EXPECT_EQ(acc.total, 7.0);
  EXPECT_TRUE(acc.layer_identity);
  NetworkSlotRecord bad = r;
  bad.received_by_layer = {7.0, 1.0};
  const std::vector<NetworkSlotRecord> two{bad};
  EXPECT_FALSE(sink_accounting(two).layer_identity);
}

std::vector<EpisodeInputs> chain_inputs(std::size_t n, std::size_t horizon,
                                        std::uint64_t seed) {
  std::vector<EpisodeInputs> in(n);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 1; i < n; ++i) {
    in[i].harvest = HarvestProcess::Schedule(
                        random_unit_schedule(3600.0, 180, horizon, rng), 20.0)
                        .Take(horizon);
    in[i].voi = VoiSource::Gaussian(1.0, 0.5, seed * 31 + i).Take(horizon);
  }
  return in;
}

void check_ledger(const NetworkEpisode& ep) {
  double sampled = 0.0, sink = 0.0;
  for (const NetworkSlotRecord& r : ep.slots) {
    ASSERT_TRUE(r.half_duplex);
    sampled += r.sampled_voi;
    sink += r.sink_voi;
    ASSERT_LE(sink, sampled + 1e-9);
    ASSERT_NEAR(sampled, sink + r.backlog_voi, 1e-6) << "slot " << r.slot;
  }
  EXPECT_TRUE(sink_accounting(ep.slots).layer_identity);
}

TEST(NetworkEpisode, ChainConservesVoi) {
  const Topology t =
      build_layers({{0, 0}, {40, 0}, {80, 0}, {120, 0}}, 50.0, 0);
  const auto in = chain_inputs(t.size(), 200, 5);
  NetworkOptions opt;
  opt.coa_quantum = 19.0;
  for (PolicyKind k : {PolicyKind::kOdc, PolicyKind::kSdc, PolicyKind::kCoa}) {
    const NetworkEpisode ep = run_network_episode(k, t, opt, in, 3);
    ASSERT_EQ(ep.slots.size(), 200u);
    check_ledger(ep);
    double delivered = 0.0;
    for (const auto& r : ep.slots) delivered += r.sink_voi;
    EXPECT_GT(delivered, 0.0) << policy_name(k);
  }
}

TEST(NetworkEpisode, RandomLayoutsConserveVoiAndAreDeterministic) {
  std::mt19937_64 rng(9);
  NetworkOptions opt;
  opt.coa_quantum = 19.0;
  for (std::size_t n : {20u, 80u}) {
    const Topology t = random_topology(n, 100.0, 100.0, 50.0, rng);
    const auto in = chain_inputs(t.size(), 100, n);
    for (PolicyKind k :
         {PolicyKind::kOdc, PolicyKind::kSdc, PolicyKind::kCoa}) {
      const NetworkEpisode a = run_network_episode(k, t, opt, in, 4);
      check_ledger(a);
      const NetworkEpisode b = run_network_episode(k, t, opt, in, 4);
      EXPECT_EQ(a.node_voi, b.node_voi);
    }
  }
}

}  // namespace
}  // namespace odc
