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

#include "gpmw/routing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

namespace gpmw {
namespace {

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

[[noreturn]] void parse_fail(const char* what, int line_no,
                             const std::string& line) {
  std::ostringstream os;
  os << what << " at line " << line_no << ": '" << line << "'";
  throw ConfigError(os.str());
}

}  // namespace

void parse_tntp_network(std::istream& in, RoadNetwork& net, double time_scale) {
  std::string line;
  int line_no = 0;
  int declared_nodes = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line) || line[line.find_first_not_of(" \t")] == '~') continue;
    auto first = line.find_first_not_of(" \t");
    if (line[first] == '<') {
      auto close = line.find('>');
      if (close == std::string::npos) parse_fail("unterminated metadata", line_no, line);
      std::string key = line.substr(first + 1, close - first - 1);
      std::string rest = line.substr(close + 1);
      if (key == "NUMBER OF NODES") declared_nodes = std::atoi(rest.c_str());
      continue;
    }
    std::istringstream row(line);
    int from, to;
    double capacity, length, fft;
    if (!(row >> from >> to >> capacity >> length >> fft)) {
      parse_fail("malformed edge record", line_no, line);
    }
    if (from < 1 || to < 1 || !(capacity > 0.0) || !(fft > 0.0)) {
      parse_fail("edge record outside valid ranges", line_no, line);
    }
    RoadNetwork::Edge e;
    e.from = from - 1;
    e.to = to - 1;
    e.capacity = capacity;
    e.free_flow_time = fft * time_scale;
    net.edges.push_back(e);
    net.num_nodes = std::max({net.num_nodes, from, to});
  }
  net.num_nodes = std::max(net.num_nodes, declared_nodes);
}

void parse_tntp_trips(std::istream& in, RoadNetwork& net) {
  std::string line;
  int line_no = 0;
  int origin = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line) || line[line.find_first_not_of(" \t")] == '~') continue;
    auto first = line.find_first_not_of(" \t");
    if (line[first] == '<') continue;  // metadata
    std::istringstream row(line);
    std::string tok;
    row >> tok;
    if (tok == "Origin") {
      if (!(row >> origin) || origin < 1) {
        parse_fail("malformed Origin header", line_no, line);
      }
      continue;
    }
    if (origin < 0) parse_fail("destination entry before any Origin", line_no, line);
    // "dest : flow ;" groups, several per line.
    std::istringstream entries(line);
    int dest;
    char colon;
    double flow;
    while (entries >> dest) {
      if (!(entries >> colon) || colon != ':' || !(entries >> flow)) {
        parse_fail("malformed trip entry", line_no, line);
      }
      char semi;
      if (entries >> semi && semi != ';') {
        parse_fail("expected ';' after trip entry", line_no, line);
      }
      if (flow < 0.0) parse_fail("negative demand", line_no, line);
      if (flow == 0.0) continue;  // zero-demand pairs are skipped
      if (dest == origin) parse_fail("self-loop demand", line_no, line);
      net.demands.push_back({origin - 1, dest - 1, flow});
      net.num_nodes = std::max({net.num_nodes, origin, dest});
    }
  }
}

RoadNetwork load_tntp(const std::string& network_path,
                      const std::string& trips_path, double time_scale) {
  RoadNetwork net;
  std::ifstream nf(network_path);
  if (!nf) throw ConfigError("cannot open network file: " + network_path);
  parse_tntp_network(nf, net, time_scale);
  if (net.edges.empty()) {
    throw ConfigError("network file has no edges: " + network_path);
  }
  std::ifstream tf(trips_path);
  if (!tf) throw ConfigError("cannot open trips file: " + trips_path);
  parse_tntp_trips(tf, net);
  return net;
}

double bpr_travel_time(double free_flow_time, double capacity, double x) {
  if (!(free_flow_time > 0.0) || !(capacity > 0.0)) {
    throw InputError("bpr_travel_time: parameters must be positive");
  }
  if (x < 0.0 || !std::isfinite(x)) {
    throw InputError("bpr_travel_time: load must be nonnegative");
  }
  const double r = x / capacity;
  const double r2 = r * r;
  return free_flow_time * (1.0 + 0.15 * r2 * r2);
}

namespace {

struct DijkstraResult {
  std::vector<double> dist;
  std::vector<int> parent_edge;
};

// Plain Dijkstra with optional banned edges/nodes (Yen spur searches).
DijkstraResult dijkstra(const RoadNetwork& net,
                        std::span<const double> weights,
                        const std::vector<std::vector<int>>& out_edges,
                        int source, const std::vector<char>* banned_edge,
                        const std::vector<char>* banned_node) {
  const double inf = std::numeric_limits<double>::infinity();
  DijkstraResult res;
  res.dist.assign(net.num_nodes, inf);
  res.parent_edge.assign(net.num_nodes, -1);
  if (banned_node && (*banned_node)[source]) return res;
  res.dist[source] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  queue.push({0.0, source});
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (d > res.dist[u]) continue;
    for (int eid : out_edges[u]) {
      if (banned_edge && (*banned_edge)[eid]) continue;
      const auto& e = net.edges[eid];
      if (banned_node && (*banned_node)[e.to]) continue;
      const double nd = d + weights[eid];
      if (nd < res.dist[e.to]) {
        res.dist[e.to] = nd;
        res.parent_edge[e.to] = eid;
        queue.push({nd, e.to});
      }
    }
  }
  return res;
}

std::vector<int> extract_path(const RoadNetwork& net, const DijkstraResult& r,
                              int source, int dest) {
  std::vector<int> path;
  int node = dest;
  while (node != source) {
    int eid = r.parent_edge[node];
    if (eid < 0) return {};
    path.push_back(eid);
    node = net.edges[eid].from;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double path_cost(std::span<const double> weights, const std::vector<int>& p) {
  double c = 0.0;
  for (int eid : p) c += weights[eid];
  return c;
}

}  // namespace

std::vector<std::vector<int>> k_shortest_paths(
    const RoadNetwork& net, std::span<const double> edge_weights, int origin,
    int dest, int k) {
  if (origin < 0 || origin >= net.num_nodes || dest < 0 ||
      dest >= net.num_nodes) {
    throw InputError("k_shortest_paths: node out of range");
  }
  if (origin == dest || k < 1) return {};
  std::vector<std::vector<int>> out_edges(net.num_nodes);
  for (int i = 0; i < static_cast<int>(net.edges.size()); ++i) {
    out_edges[net.edges[i].from].push_back(i);
  }

  std::vector<std::vector<int>> accepted;
  auto base = dijkstra(net, edge_weights, out_edges, origin, nullptr, nullptr);
  auto first = extract_path(net, base, origin, dest);
  if (first.empty()) return {};
  accepted.push_back(std::move(first));

  using Candidate = std::pair<double, std::vector<int>>;
  std::set<Candidate> candidates;

  while (static_cast<int>(accepted.size()) < k) {
    const auto& prev = accepted.back();
    std::vector<char> banned_edge(net.edges.size(), 0);
    std::vector<char> banned_node(net.num_nodes, 0);
    std::vector<int> root;
    double root_cost = 0.0;
    for (std::size_t i = 0; i < prev.size(); ++i) {
      const int spur_node =
          (i == 0) ? origin : net.edges[prev[i - 1]].to;
      // Ban the continuations used by accepted paths sharing this root.
      std::fill(banned_edge.begin(), banned_edge.end(), 0);
      for (const auto& p : accepted) {
        if (p.size() > i && std::equal(root.begin(), root.end(), p.begin())) {
          banned_edge[p[i]] = 1;
        }
      }
      auto spur =
          dijkstra(net, edge_weights, out_edges, spur_node, &banned_edge,
                   &banned_node);
      auto tail = extract_path(net, spur, spur_node, dest);
      if (!tail.empty()) {
        std::vector<int> full = root;
        full.insert(full.end(), tail.begin(), tail.end());
        candidates.insert(
            {root_cost + path_cost(edge_weights, tail), std::move(full)});
      }
      // The spur node joins the banned set for deeper spurs.
      banned_node[spur_node] = 1;
      root.push_back(prev[i]);
      root_cost += edge_weights[prev[i]];
    }
    if (candidates.empty()) break;
    auto best = candidates.begin();
    // Skip candidates already accepted (the same path can be found twice).
    while (best != candidates.end() &&
           std::find(accepted.begin(), accepted.end(), best->second) !=
               accepted.end()) {
      best = candidates.erase(best);
    }
    if (best == candidates.end()) break;
    accepted.push_back(best->second);
    candidates.erase(best);
  }
  return accepted;
}

std::vector<double> AgentRoutes::profile(int route) const {
  if (route < 0 || route >= num_routes()) {
    throw InputError("AgentRoutes: route index out of range");
  }
  std::vector<double> p(edge_subset.size(), 0.0);
  for (int local : routes[route]) p[local] = units;
  return p;
}

AgentRoutes enumerate_routes(const RoadNetwork& net,
                             const RoadNetwork::Demand& od, int agent_id,
                             int k) {
  std::vector<double> weights(net.edges.size());
  for (std::size_t i = 0; i < net.edges.size(); ++i) {
    weights[i] = net.edges[i].free_flow_time;
  }
  auto paths = k_shortest_paths(net, weights, od.origin, od.dest, k);
  if (paths.empty()) {
    std::ostringstream os;
    os << "enumerate_routes: origin " << od.origin + 1 << " and destination "
       << od.dest + 1 << " are not connected";
    throw ConfigError(os.str());
  }
  const double shortest = path_cost(weights, paths.front());
  std::vector<std::vector<int>> kept;
  for (auto& p : paths) {
    if (path_cost(weights, p) <= 3.0 * shortest) kept.push_back(std::move(p));
  }

  AgentRoutes ar;
  ar.agent = agent_id;
  ar.units = od.units;
  for (const auto& p : kept) {
    for (int eid : p) ar.edge_subset.push_back(eid);
  }
  std::sort(ar.edge_subset.begin(), ar.edge_subset.end());
  ar.edge_subset.erase(
      std::unique(ar.edge_subset.begin(), ar.edge_subset.end()),
      ar.edge_subset.end());
  for (const auto& p : kept) {
    std::vector<int> locals;
    locals.reserve(p.size());
    for (int eid : p) {
      auto it = std::lower_bound(ar.edge_subset.begin(), ar.edge_subset.end(),
                                 eid);
      locals.push_back(static_cast<int>(it - ar.edge_subset.begin()));
    }
    ar.routes.push_back(std::move(locals));
    ar.free_flow_costs.push_back(path_cost(weights, p));
  }
  return ar;
}

RoutingGame::RoutingGame(RoadNetwork net, int max_routes)
    : net_(std::move(net)) {
  agents_.reserve(net_.demands.size());
  for (std::size_t i = 0; i < net_.demands.size(); ++i) {
    agents_.push_back(
        enumerate_routes(net_, net_.demands[i], static_cast<int>(i), max_routes));
  }
}

std::vector<double> RoutingGame::edge_loads(std::span<const int> choices) const {
  if (choices.size() != agents_.size()) {
    throw InputError("edge_loads: one choice per agent required");
  }
  std::vector<double> loads(net_.edges.size(), 0.0);
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto& a = agents_[i];
    for (int local : a.routes[choices[i]]) {
      loads[a.edge_subset[local]] += a.units;
    }
  }
  return loads;
}

std::vector<double> RoutingGame::occupancy(std::span<const int> choices,
                                           int agent) const {
  auto loads = edge_loads(choices);
  return occupancy_from_loads(loads, agent, choices[agent]);
}

std::vector<double> RoutingGame::occupancy_from_loads(
    std::span<const double> loads, int agent, int choice) const {
  const auto& a = agents_[agent];
  std::vector<double> psi(a.edge_subset.size());
  for (std::size_t j = 0; j < a.edge_subset.size(); ++j) {
    psi[j] = loads[a.edge_subset[j]];
  }
  for (int local : a.routes[choice]) psi[local] -= a.units;
  return psi;
}

double RoutingGame::agent_travel_time(int agent, int route,
                                      std::span<const double> psi) const {
  const auto& a = agents_[agent];
  if (psi.size() != a.edge_subset.size()) {
    throw InputError("agent_travel_time: occupancy does not match E(i)");
  }
  double total = 0.0;
  for (int local : a.routes[route]) {
    const auto& e = net_.edges[a.edge_subset[local]];
    total += a.units *
             bpr_travel_time(e.free_flow_time, e.capacity, a.units + psi[local]);
  }
  return total;
}

double RoutingGame::congestion(std::span<const double> loads) const {
  double total = 0.0;
  for (std::size_t e = 0; e < net_.edges.size(); ++e) {
    const double r = loads[e] / net_.edges[e].capacity;
    const double r2 = r * r;
    total += 0.15 * r2 * r2;
  }
  return total / static_cast<double>(net_.edges.size());
}

double RoutingGame::congestion_for(std::span<const int> choices) const {
  auto loads = edge_loads(choices);
  return congestion(loads);
}

namespace {

// One uniformly random joint outcome; travel times appended to maxima.
void bound_sample(const RoutingGame& game, std::uint64_t seed, std::uint64_t s,
                  std::vector<double>& maxima) {
  const auto& agents = game.agents();
  Rng rng(derive_seed(seed, s, 7));
  std::vector<int> choices(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    choices[i] = rng.uniform_index(agents[i].num_routes());
  }
  auto loads = game.edge_loads(choices);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    auto psi = game.occupancy_from_loads(loads, static_cast<int>(i), choices[i]);
    double t = game.agent_travel_time(static_cast<int>(i), choices[i], psi);
    maxima[i] = std::max(maxima[i], t);
  }
}

}  // namespace

RoutingGame::RewardScale RoutingGame::estimate_bounds(
    int samples, std::uint64_t seed) const {
  const int n = num_agents();
  std::vector<double> maxima(n, 0.0);
#pragma omp parallel
  {
    std::vector<double> local(n, 0.0);
#pragma omp for schedule(static)
    for (int s = 0; s < samples; ++s) {
      bound_sample(*this, seed, static_cast<std::uint64_t>(s), local);
    }
#pragma omp critical
    {
      for (int i = 0; i < n; ++i) maxima[i] = std::max(maxima[i], local[i]);
    }
  }
  RewardScale scale;
  scale.bound = std::move(maxima);
  scale.noise_std.resize(n);
  for (int i = 0; i < n; ++i) scale.noise_std[i] = 0.001 * scale.bound[i];
  return scale;
}

RoutingGame::RewardScale RoutingGame::estimate_bounds_serial(
    int samples, std::uint64_t seed) const {
  const int n = num_agents();
  std::vector<double> maxima(n, 0.0);
  for (int s = 0; s < samples; ++s) {
    bound_sample(*this, seed, static_cast<std::uint64_t>(s), maxima);
  }
  RewardScale scale;
  scale.bound = std::move(maxima);
  scale.noise_std.resize(n);
  for (int i = 0; i < n; ++i) scale.noise_std[i] = 0.001 * scale.bound[i];
  return scale;
}

}  // namespace gpmw
