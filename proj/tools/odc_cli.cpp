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


// Command-line front end: experiments, bound evaluation, trace and
// topology checks.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "odc/bandit.hpp"
#include "odc/harness.hpp"
#include "odc/network.hpp"

namespace {

int run_cmd(const std::string& config_path, const std::string& output) {
  odc::ExperimentConfig config = odc::load_config(config_path);
  if (!output.empty()) config.output_dir = output;
  const odc::ExperimentSummary summary = odc::run_experiment(config);
  const auto dir = odc::write_outputs(config, summary);
  std::cout << "wrote " << dir.string() << '\n';
  if (!summary.single.empty()) {
    for (std::size_t p = 0; p < summary.policies.size(); ++p) {
      double total = 0.0;
      for (const auto& t : summary.single) {
        total += t.logs[p].back().cumulative_voi;
      }
      std::printf("%s mean total VoI %.4f\n",
                  std::string(odc::policy_name(summary.policies[p])).c_str(),
                  total / static_cast<double>(summary.single.size()));
    }
  }
  return 0;
}

int bounds_cmd(const std::vector<double>& deltas, double cmax, double cmin,
               double eprime, double horizon, bool store, double best_mean) {
  for (double d : deltas) {
    std::printf("delta %.6g pull_count_bound %.6f\n", d,
                odc::pull_count_bound(d, cmax, cmin, eprime, horizon, store));
  }
  std::printf("regret_bound %.6f\n",
              odc::regret_bound(deltas, best_mean, cmax, cmin, eprime, horizon));
  return 0;
}

int validate_cmd(const std::string& path) {
  const auto records = odc::load_trace(path);
  double harvest = 0.0;
  for (const auto& r : records) harvest += r.harvest_ma;
  std::printf("ok: %zu slots, total harvest %.3f mA·slot\n", records.size(),
              harvest);
  return 0;
}

int layers_cmd(const std::string& path, double radius, std::size_t sink) {
  std::ifstream in(path);
  if (!in) throw odc::TopologyError("cannot open '" + path + "'");
  const odc::Topology topo =
      odc::build_layers(odc::read_positions_csv(in), radius, sink);
  odc::write_topology_csv(std::cout, topo);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opportunistic duty cycling simulator"};
  app.require_subcommand(1);

  std::string config_path, output;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--output", output, "output directory");

  std::vector<double> deltas;
  double cmax = 0.0, cmin = 0.0, eprime = 2.0, horizon = 0.0, best = 1.0;
  bool store = false;
  auto* bounds = app.add_subcommand("bounds", "evaluate pull-count and regret bounds");
  bounds->add_option("--delta", deltas, "reward-per-cost gaps")->required();
  bounds->add_option("--cmax", cmax, "largest action cost")->required();
  bounds->add_option("--cmin", cmin, "smallest action cost")->required();
  bounds->add_option("--eprime", eprime, "exploration constant");
  bounds->add_option("--horizon", horizon, "usable slots")->required();
  bounds->add_option("--best-mean", best, "best arm mean reward per cost");
  bounds->add_flag("--store", store, "bound for the store arm");

  std::string trace_path;
  auto* validate = app.add_subcommand("validate", "check a harvest trace");
  validate->add_option("trace", trace_path, "trace CSV")->required();

  std::string topo_path;
  double radius = 50.0;
  std::size_t sink = 0;
  auto* layers = app.add_subcommand("layers", "assign routing layers");
  layers->add_option("topology", topo_path, "CSV with node,x,y")->required();
  layers->add_option("--radius", radius, "communication radius (m)");
  layers->add_option("--sink", sink, "sink node id");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return run_cmd(config_path, output);
    if (*bounds) {
      return bounds_cmd(deltas, cmax, cmin, eprime, horizon, store, best);
    }
    if (*validate) return validate_cmd(trace_path);
    if (*layers) return layers_cmd(topo_path, radius, sink);
  } catch (const odc::ConfigError& e) {
    std::cerr << "ConfigError: " << e.what() << '\n';
    return 2;
  } catch (const odc::TraceError& e) {
    std::cerr << "TraceError: " << e.what() << '\n';
    return 3;
  } catch (const odc::TopologyError& e) {
    std::cerr << "TopologyError: " << e.what() << '\n';
    return 4;
  } catch (const odc::BanditError& e) {
    std::cerr << "BoundError: " << e.what() << '\n';
    return 5;
  } catch (const odc::ModelError& e) {
    std::cerr << "ModelError: " << e.what() << '\n';
    return 6;
  } catch (const std::exception& e) {
    std::cerr << "Error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
