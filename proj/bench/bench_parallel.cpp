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

// Times the OpenMP kernels against their serial references. Outputs one row
// per kernel: serial ms, parallel ms, speedup. Results must agree bitwise;
// this binary asserts that too.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "gpmw/matrix_game.hpp"
#include "gpmw/posterior.hpp"
#include "gpmw/routing.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

void bench_predict_batch() {
  gpmw::Rng rng(42);
  gpmw::GpPosterior gp(gpmw::KernelSpec::se(1.0), 0.01);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x{rng.uniform01() * 10, rng.uniform01() * 10};
    gp.append(x, rng.normal());
  }
  std::vector<std::vector<double>> queries(4000);
  for (auto& q : queries) q = {rng.uniform01() * 10, rng.uniform01() * 10};

  auto t0 = Clock::now();
  auto serial = gpmw::predict_batch_serial(gp, queries);
  const double serial_ms = ms_since(t0);
  t0 = Clock::now();
  auto parallel = gpmw::predict_batch(gp, queries);
  const double parallel_ms = ms_since(t0);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (serial[i].mean != parallel[i].mean ||
        serial[i].stddev != parallel[i].stddev) {
      std::fprintf(stderr, "predict_batch mismatch at %zu\n", i);
      std::exit(1);
    }
  }
  report("posterior batch predict", serial_ms, parallel_ms);
}

void bench_grid_kernel() {
  const auto kernel = gpmw::KernelSpec::se(6.0);
  auto t0 = Clock::now();
  auto serial = gpmw::grid_kernel_matrix_serial(30, kernel);
  const double serial_ms = ms_since(t0);
  t0 = Clock::now();
  auto parallel = gpmw::grid_kernel_matrix(30, kernel);
  const double parallel_ms = ms_since(t0);
  if (serial != parallel) {
    std::fprintf(stderr, "grid_kernel_matrix mismatch\n");
    std::exit(1);
  }
  report("grid kernel matrix (K=30)", serial_ms, parallel_ms);
}

gpmw::RoadNetwork synthetic_grid_network(int side) {
  gpmw::RoadNetwork net;
  net.num_nodes = side * side;
  auto add_edge = [&](int a, int b) {
    net.edges.push_back({a, b, 1.0 + (a * 7 + b) % 5, 50.0 + (a * 13) % 40});
  };
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const int n = r * side + c;
      if (c + 1 < side) {
        add_edge(n, n + 1);
        add_edge(n + 1, n);
      }
      if (r + 1 < side) {
        add_edge(n, n + side);
        add_edge(n + side, n);
      }
    }
  }
  gpmw::Rng rng(7);
  for (int i = 0; i < 40; ++i) {
    int o = rng.uniform_index(net.num_nodes);
    int d = rng.uniform_index(net.num_nodes);
    if (o == d) continue;
    net.demands.push_back({o, d, 5.0 + 10.0 * rng.uniform01()});
  }
  return net;
}

void bench_bound_estimation() {
  gpmw::RoutingGame game(synthetic_grid_network(6), 5);
  auto t0 = Clock::now();
  auto serial = game.estimate_bounds_serial(4000, 99);
  const double serial_ms = ms_since(t0);
  t0 = Clock::now();
  auto parallel = game.estimate_bounds(4000, 99);
  const double parallel_ms = ms_since(t0);
  if (serial.bound != parallel.bound) {
    std::fprintf(stderr, "estimate_bounds mismatch\n");
    std::exit(1);
  }
  report("reward bound sampling", serial_ms, parallel_ms);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; both columns run serial code\n");
#endif
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel",
              "speedup");
  bench_predict_batch();
  bench_grid_kernel();
  bench_bound_estimation();
  return 0;
}
