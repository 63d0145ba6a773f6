// Copyright 2026 The gpmw Authors. All rights reserved.
//
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

#ifndef GPMW_ROUTING_HPP_
#define GPMW_ROUTING_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gpmw/common.hpp"

namespace gpmw {

// Directed road network with BPR edge parameters and origin-destination
// demand. Node ids are 0-based internally (TNTP files are 1-based).
struct RoadNetwork {
  struct Edge {
    int from = 0;
    int to = 0;
    double free_flow_time = 0.0;  // c_e
    double capacity = 0.0;        // C_e
  };
  struct Demand {
    int origin = 0;
    int dest = 0;
    double units = 0.0;  // u^i
  };

  int num_nodes = 0;
  std::vector<Edge> edges;
  std::vector<Demand> demands;
};

// TNTP flat files: "<KEY> value" metadata, "~" comments, whitespace-separated
// edge records (init_node, term_node, capacity, length, free_flow_time, ...)
// optionally terminated by ';'. Trips files hold "Origin N" blocks with
// "dest : flow ;" entries; zero-demand pairs are skipped. Malformed lines
// raise ConfigError naming the line number. time_scale multiplies every
// free-flow time on load.
RoadNetwork load_tntp(const std::string& network_path,
                      const std::string& trips_path, double time_scale = 1.0);
void parse_tntp_network(std::istream& in, RoadNetwork& net, double time_scale);
void parse_tntp_trips(std::istream& in, RoadNetwork& net);

// BPR latency c_e (1 + 0.15 (x / C_e)^4). Throws InputError on negative load.
double bpr_travel_time(double free_flow_time, double capacity, double x);

// Up to k loopless shortest paths (by edge weight) from origin to dest, each
// a list of edge indices, sorted by cost then lexicographically. Yen-style
// spur enumeration over Dijkstra.
std::vector<std::vector<int>> k_shortest_paths(
    const RoadNetwork& net, std::span<const double> edge_weights, int origin,
    int dest, int k);

// One agent's action set: up to 5 routes over its edge subset E(i), as
// incidence profiles scaled by the demand units.
struct AgentRoutes {
  int agent = 0;
  double units = 0.0;
  std::vector<int> edge_subset;            // E(i): global edge ids, sorted
  std::vector<std::vector<int>> routes;    // per route: indices into edge_subset
  std::vector<double> free_flow_costs;     // per route

  int num_routes() const { return static_cast<int>(routes.size()); }
  // Incidence profile over E(i): units on route edges, 0 elsewhere.
  std::vector<double> profile(int route) const;
};

// K shortest loopless routes by free-flow time, pruned of any route longer
// than 3x the shortest, as incidence profiles. Throws ConfigError when the
// origin-destination pair is disconnected.
AgentRoutes enumerate_routes(const RoadNetwork& net,
                             const RoadNetwork::Demand& od, int agent_id,
                             int k = 5);

// The repeated routing game over enumerated per-agent route sets.
class RoutingGame {
 public:
  explicit RoutingGame(RoadNetwork net, int max_routes = 5);

  const RoadNetwork& network() const { return net_; }
  const std::vector<AgentRoutes>& agents() const { return agents_; }
  int num_agents() const { return static_cast<int>(agents_.size()); }

  // Total per-edge load of a joint route choice (all agents).
  std::vector<double> edge_loads(std::span<const int> choices) const;

  // psi(a^{-i}): occupancy by the other agents, restricted to E(i).
  std::vector<double> occupancy(std::span<const int> choices, int agent) const;
  // Same, subtracting the agent's own load from precomputed totals.
  std::vector<double> occupancy_from_loads(std::span<const double> loads,
                                           int agent, int choice) const;

  // l^i: sum over the route's edges of units * t_e(own + psi_e).
  double agent_travel_time(int agent, int route,
                           std::span<const double> psi) const;

  // Mean over all edges of 0.15 (total load / C_e)^4.
  double congestion(std::span<const double> loads) const;
  double congestion_for(std::span<const int> choices) const;

  // Per-agent travel-time upper bounds estimated from `samples` uniformly
  // random joint outcomes, and noise scales at 0.1% of the bounds. The
  // OpenMP and serial paths give identical results (per-sample seeds,
  // max/compare reduction).
  struct RewardScale {
    std::vector<double> bound;      // per agent
    std::vector<double> noise_std;  // 0.001 * bound
  };
  RewardScale estimate_bounds(int samples, std::uint64_t seed) const;
  RewardScale estimate_bounds_serial(int samples, std::uint64_t seed) const;

 private:
  RoadNetwork net_;
  std::vector<AgentRoutes> agents_;
};

}  // namespace gpmw

#endif  // GPMW_ROUTING_HPP_
