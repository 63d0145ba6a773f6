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

#include "gpmw/matrix_game.hpp"

#include <algorithm>
#include <cmath>

#include "gpmw/posterior.hpp"

namespace gpmw {
namespace {

void fill_row(std::vector<double>& m, int K, const KernelSpec& kernel, int r) {
  const int n = K * K;
  const double pr[2] = {static_cast<double>(r / K),
                        static_cast<double>(r % K)};
  for (int c = 0; c < n; ++c) {
    const double pc[2] = {static_cast<double>(c / K),
                          static_cast<double>(c % K)};
    m[static_cast<std::size_t>(r) * n + c] = eval_kernel(kernel, pr, pc);
  }
}

}  // namespace

std::vector<double> grid_kernel_matrix(int K, const KernelSpec& kernel) {
  const int n = K * K;
  std::vector<double> m(static_cast<std::size_t>(n) * n);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) fill_row(m, K, kernel, r);
  return m;
}

std::vector<double> grid_kernel_matrix_serial(int K, const KernelSpec& kernel) {
  const int n = K * K;
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r) fill_row(m, K, kernel, r);
  return m;
}

std::vector<double> sample_gp_grid(int K, const KernelSpec& kernel,
                                   std::uint64_t seed) {
  if (K < 1) throw ConfigError("sample_gp_grid: K must be positive");
  validate_kernel(kernel);
  const int n = K * K;
  auto m = grid_kernel_matrix(K, kernel);
  dense_cholesky(m, n, 1e-9);
  Rng rng(seed);
  std::vector<double> z(n);
  for (double& v : z) v = rng.normal();
  std::vector<double> sample(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    const double* row = &m[static_cast<std::size_t>(i) * n];
    for (int j = 0; j <= i; ++j) s += row[j] * z[j];
    sample[i] = s;
  }
  return sample;
}

MatrixGame sample_matrix_game(int K, const KernelSpec& kernel,
                              std::uint64_t seed) {
  if (K < 2) throw ConfigError("sample_matrix_game: K must be >= 2");
  MatrixGame game;
  game.K = K;
  game.payoff = sample_gp_grid(K, kernel, seed);
  auto [mn, mx] = std::minmax_element(game.payoff.begin(), game.payoff.end());
  game.rescale_min = *mn;
  game.rescale_max = *mx;
  const double spread = *mx - *mn;
  if (spread < 1e-9) {
    std::fill(game.payoff.begin(), game.payoff.end(), 0.5);
  } else {
    for (double& v : game.payoff) v = (v - game.rescale_min) / spread;
  }
  return game;
}

}  // namespace gpmw
