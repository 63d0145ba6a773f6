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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "gpmw/routing.hpp"

using namespace gpmw;

namespace {

RoadNetwork diamond_network() {
  // Three parallel connections from node 0 to node 3 with free-flow costs
  // 2 (via 1), 3 (direct edge), 7 (via 2).
  RoadNetwork net;
  net.num_nodes = 4;
  net.edges = {
      {0, 1, 1.0, 10.0}, {1, 3, 1.0, 10.0},  // cost 2
      {0, 3, 3.0, 10.0},                     // cost 3
      {0, 2, 3.0, 10.0}, {2, 3, 4.0, 10.0},  // cost 7
  };
  net.demands = {{0, 3, 2.0}};
  return net;
}

}  // namespace

TEST_CASE("bpr travel time") {
  CHECK(bpr_travel_time(4.0, 10.0, 0.0) == 4.0);  // free flow
  CHECK(bpr_travel_time(4.0, 10.0, 10.0) == doctest::Approx(4.6));  // 1.15 c
  CHECK(bpr_travel_time(6.0, 10.0, 20.0) == doctest::Approx(20.4));
  CHECK_THROWS_AS(bpr_travel_time(4.0, 10.0, -1.0), InputError);
  CHECK_THROWS_AS(bpr_travel_time(0.0, 10.0, 1.0), InputError);
}

TEST_CASE("bpr is increasing and convex in the load") {
  const double c = 3.0, cap = 12.0, h = 0.5;
  double prev = bpr_travel_time(c, cap, 0.0);
  double prev_diff = 0.0;
  for (int i = 1; i <= 60; ++i) {
    const double t = bpr_travel_time(c, cap, i * h);
    const double diff = t - prev;
    CHECK(diff >= 0.0);
    if (i > 1) CHECK(diff >= prev_diff - 1e-12);
    prev = t;
    prev_diff = diff;
  }
}

TEST_CASE("tntp parser reads the standard formats") {
  std::istringstream net_in(
      "<NUMBER OF NODES> 3\n"
      "<END OF METADATA>\n"
      "~ header comment\n"
      "  1   2   100.0  1.0  2.5   0.15  4  0  0  1 ;\n"
      "\t2\t3\t50\t1\t1.5\t0.15\t4\t0\t0\t1\t;\n");
  RoadNetwork net;
  parse_tntp_network(net_in, net, 1.0);
  REQUIRE(net.edges.size() == 2);
  CHECK(net.num_nodes == 3);
  CHECK(net.edges[0].from == 0);
  CHECK(net.edges[0].to == 1);
  CHECK(net.edges[0].capacity == 100.0);
  CHECK(net.edges[0].free_flow_time == 2.5);

  std::istringstream trips_in(
      "<NUMBER OF ZONES> 3\n"
      "Origin 1\n"
      "  1 : 0.0;  2 : 10.0;   3 :  0.0;\n"
      "Origin  2\n"
      "  3 : 5.5;\n");
  parse_tntp_trips(trips_in, net);
  REQUIRE(net.demands.size() == 2);  // zero-demand pairs skipped
  CHECK(net.demands[0].origin == 0);
  CHECK(net.demands[0].dest == 1);
  CHECK(net.demands[0].units == 10.0);
  CHECK(net.demands[1].units == 5.5);
}

TEST_CASE("tntp parser reports malformed lines by number") {
  std::istringstream bad(
      "<END OF METADATA>\n"
      "1 2 100 1 2.5 0.15 4 0 0 1 ;\n"
      "1 oops 100\n");
  RoadNetwork net;
  try {
    parse_tntp_network(bad, net, 1.0);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("time_scale multiplies free-flow times on load") {
  std::istringstream net_in(
      "<END OF METADATA>\n"
      "1 2 100 1 2.0 0.15 4 0 0 1 ;\n");
  RoadNetwork net;
  parse_tntp_network(net_in, net, 0.01);
  CHECK(net.edges[0].free_flow_time == doctest::Approx(0.02));
}

TEST_CASE("k shortest paths on toy graphs") {
  RoadNetwork two;
  two.num_nodes = 2;
  two.edges = {{0, 1, 1.0, 5.0}};
  std::vector<double> w{1.0};
  auto paths = k_shortest_paths(two, w, 0, 1, 5);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0] == std::vector<int>{0});

  auto net = diamond_network();
  std::vector<double> weights;
  for (const auto& e : net.edges) weights.push_back(e.free_flow_time);
  auto three = k_shortest_paths(net, weights, 0, 3, 5);
  REQUIRE(three.size() == 3);
  CHECK(three[0] == std::vector<int>{0, 1});  // cost 2
  CHECK(three[1] == std::vector<int>{2});     // cost 3
  CHECK(three[2] == std::vector<int>{3, 4});  // cost 7

  CHECK(k_shortest_paths(net, weights, 0, 0, 3).empty());
}

TEST_CASE("route enumeration prunes beyond three times the shortest") {
  auto net = diamond_network();
  auto routes = enumerate_routes(net, net.demands[0], 0, 5);
  // Costs {2, 3, 7}: 7 > 3 * 2 is pruned.
  REQUIRE(routes.num_routes() == 2);
  CHECK(routes.free_flow_costs[0] == doctest::Approx(2.0));
  CHECK(routes.free_flow_costs[1] == doctest::Approx(3.0));
  CHECK(routes.units == 2.0);

  // Profiles carry the demand on route edges.
  auto p0 = routes.profile(0);
  double total = 0.0;
  for (double v : p0) total += v;
  CHECK(total == doctest::Approx(4.0));  // two edges at u = 2

  RoadNetwork disconnected;
  disconnected.num_nodes = 3;
  disconnected.edges = {{0, 1, 1.0, 5.0}};
  RoadNetwork::Demand bad{0, 2, 1.0};
  CHECK_THROWS_AS(enumerate_routes(disconnected, bad, 0), ConfigError);
}

TEST_CASE("occupancy matches a brute-force double loop") {
  Rng rng(3);
  RoadNetwork net;
  net.num_nodes = 6;
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      if (a != b && (a + b) % 2 == 1) {
        net.edges.push_back({a, b, 1.0 + ((a * 3 + b) % 4), 10.0});
      }
    }
  }
  for (int i = 0; i < 20; ++i) {
    int o = rng.uniform_index(6), d = rng.uniform_index(6);
    if (o == d) d = (d + 1) % 6;
    net.demands.push_back({o, d, 1.0 + rng.uniform_index(5)});
  }
  RoutingGame game(std::move(net), 4);
  const int n = game.num_agents();
  std::vector<int> choices(n);
  for (int i = 0; i < n; ++i) {
    choices[i] = rng.uniform_index(game.agents()[i].num_routes());
  }
  for (int i = 0; i < n; ++i) {
    auto psi = game.occupancy(choices, i);
    // Brute force: sum over other agents' incidence on E(i).
    const auto& me = game.agents()[i];
    std::vector<double> expect(me.edge_subset.size(), 0.0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto& other = game.agents()[j];
      for (int local : other.routes[choices[j]]) {
        const int eid = other.edge_subset[local];
        for (std::size_t l = 0; l < me.edge_subset.size(); ++l) {
          if (me.edge_subset[l] == eid) expect[l] += other.units;
        }
      }
    }
    CHECK(psi == expect);  // integer-valued loads: exact equality
  }
}

TEST_CASE("single agent sees zero occupancy") {
  RoadNetwork net;
  net.num_nodes = 2;
  net.edges = {{0, 1, 1.0, 1.0}};
  net.demands = {{0, 1, 1.0}};
  RoutingGame game(std::move(net), 5);
  std::vector<int> choices{0};
  auto psi = game.occupancy(choices, 0);
  REQUIRE(psi.size() == 1);
  CHECK(psi[0] == 0.0);
  // One edge, u = 1, psi = 0, c = 1, C = 1: weighted time 1 * t(1) = 1.15.
  CHECK(game.agent_travel_time(0, 0, psi) == doctest::Approx(1.15));
}

TEST_CASE("two agents sharing an edge see each other's demand") {
  RoadNetwork net;
  net.num_nodes = 2;
  net.edges = {{0, 1, 1.0, 100.0}};
  net.demands = {{0, 1, 3.0}, {0, 1, 5.0}};
  RoutingGame game(std::move(net), 5);
  std::vector<int> choices{0, 0};
  CHECK(game.occupancy(choices, 0)[0] == 5.0);
  CHECK(game.occupancy(choices, 1)[0] == 3.0);
}

TEST_CASE("agent travel time matches an edge-by-edge recomputation") {
  auto net = diamond_network();
  net.demands.push_back({0, 3, 4.0});
  RoutingGame game(std::move(net), 5);
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> choices(game.num_agents());
    for (int i = 0; i < game.num_agents(); ++i) {
      choices[i] = rng.uniform_index(game.agents()[i].num_routes());
    }
    auto loads = game.edge_loads(choices);
    for (int i = 0; i < game.num_agents(); ++i) {
      const auto& a = game.agents()[i];
      auto psi = game.occupancy_from_loads(loads, i, choices[i]);
      double expect = 0.0;
      for (int local : a.routes[choices[i]]) {
        const auto& e = game.network().edges[a.edge_subset[local]];
        expect += a.units * bpr_travel_time(e.free_flow_time, e.capacity,
                                            loads[a.edge_subset[local]]);
      }
      CHECK(game.agent_travel_time(i, choices[i], psi) ==
            doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("congestion formula") {
  RoadNetwork net;
  net.num_nodes = 2;
  net.edges = {{0, 1, 1.0, 10.0}, {1, 0, 1.0, 20.0}};
  net.demands = {{0, 1, 10.0}};
  RoutingGame game(std::move(net), 5);
  std::vector<double> empty{0.0, 0.0};
  CHECK(game.congestion(empty) == 0.0);
  // One edge exactly at capacity: edge congestion 0.15, averaged over 2.
  std::vector<double> at_cap{10.0, 0.0};
  CHECK(game.congestion(at_cap) == doctest::Approx(0.075));

  Rng rng(29);
  std::vector<double> loads{rng.uniform01() * 30, rng.uniform01() * 30};
  double expect = 0.0;
  expect += 0.15 * std::pow(loads[0] / 10.0, 4);
  expect += 0.15 * std::pow(loads[1] / 20.0, 4);
  expect /= 2.0;
  CHECK(game.congestion(loads) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("unilateral improvement reduces own cost and leaves others' loads") {
  auto net = diamond_network();
  net.demands.push_back({0, 3, 4.0});
  RoutingGame game(std::move(net), 5);
  std::vector<int> choices{0, 0};
  auto loads_before = game.edge_loads(choices);
  auto psi0 = game.occupancy_from_loads(loads_before, 0, choices[0]);
  double t0 = game.agent_travel_time(0, 0, psi0);
  double t1 = game.agent_travel_time(0, 1, psi0);
  const int better = t1 < t0 ? 1 : 0;
  std::vector<int> switched{better, 0};
  auto loads_after = game.edge_loads(switched);
  auto psi0_after = game.occupancy_from_loads(loads_after, 0, switched[0]);
  CHECK(psi0_after == psi0);  // others' contribution is unchanged
  CHECK(game.agent_travel_time(0, switched[0], psi0_after) <=
        std::min(t0, t1) + 1e-12);
}

TEST_CASE("bound estimation is reproducible and monotone in samples") {
  auto net = diamond_network();
  net.demands.push_back({0, 3, 4.0});
  net.demands.push_back({1, 3, 2.0});
  RoutingGame game(std::move(net), 5);

  auto a = game.estimate_bounds(500, 11);
  auto b = game.estimate_bounds(500, 11);
  CHECK(a.bound == b.bound);
  auto more = game.estimate_bounds(1000, 11);
  for (int i = 0; i < game.num_agents(); ++i) {
    CHECK(more.bound[i] >= a.bound[i]);  // nested sampling: max over superset
    CHECK(a.noise_std[i] == doctest::Approx(0.001 * a.bound[i]));
  }
}

TEST_CASE("single-agent bound is the deterministic worst route time") {
  RoadNetwork net;
  net.num_nodes = 2;
  net.edges = {{0, 1, 2.0, 5.0}, {0, 1, 3.0, 50.0}};
  net.demands = {{0, 1, 5.0}};
  RoutingGame game(std::move(net), 5);
  auto scale = game.estimate_bounds(50, 1);
  double worst = 0.0;
  for (int r = 0; r < game.agents()[0].num_routes(); ++r) {
    std::vector<double> psi(game.agents()[0].edge_subset.size(), 0.0);
    worst = std::max(worst, game.agent_travel_time(0, r, psi));
  }
  CHECK(scale.bound[0] == doctest::Approx(worst));
}

TEST_CASE("sioux falls loads with 528 agents and one to five routes each") {
  auto net = load_tntp(GPMW_SOURCE_DIR "/data/SiouxFalls_net.tntp",
                       GPMW_SOURCE_DIR "/data/SiouxFalls_trips.tntp", 0.01);
  CHECK(net.num_nodes == 24);
  CHECK(net.edges.size() == 76);
  CHECK(net.demands.size() == 528);

  RoutingGame game(std::move(net), 5);
  CHECK(game.num_agents() == 528);
  std::set<int> counts;
  for (const auto& a : game.agents()) {
    REQUIRE(a.num_routes() >= 1);
    REQUIRE(a.num_routes() <= 5);
    counts.insert(a.num_routes());
    // Routes are sorted by free-flow cost and pruned at 3x the shortest.
    for (int r = 0; r < a.num_routes(); ++r) {
      CHECK(a.free_flow_costs[r] <= 3.0 * a.free_flow_costs[0] + 1e-12);
      // Ties between equal-cost paths can differ by one ulp depending on
      // summation order.
      if (r > 0) {
        CHECK(a.free_flow_costs[r] >= a.free_flow_costs[r - 1] - 1e-12);
      }
    }
  }
  CHECK(counts.count(5) == 1);  // plenty of agents get the full five routes

  // Determinism of the enumeration across construction runs.
  auto net2 = load_tntp(GPMW_SOURCE_DIR "/data/SiouxFalls_net.tntp",
                        GPMW_SOURCE_DIR "/data/SiouxFalls_trips.tntp", 0.01);
  RoutingGame game2(std::move(net2), 5);
  for (int i = 0; i < game.num_agents(); ++i) {
    CHECK(game.agents()[i].routes == game2.agents()[i].routes);
  }
}
