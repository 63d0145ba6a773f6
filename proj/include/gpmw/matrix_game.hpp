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

#ifndef GPMW_MATRIX_GAME_HPP_
#define GPMW_MATRIX_GAME_HPP_

#include <cstdint>
#include <vector>

#include "gpmw/common.hpp"
#include "gpmw/kernel.hpp"

namespace gpmw {

// Two-player game on a shared K x K payoff table with entries in [0, 1].
// Both players receive the same entry (the sampled-reward setup).
struct MatrixGame {
  int K = 0;
  std::vector<double> payoff;  // row-major, payoff[a1 * K + a2]
  double rescale_min = 0.0;    // affine transform applied to the raw sample
  double rescale_max = 1.0;

  double reward(int a1, int a2) const {
    if (a1 < 0 || a1 >= K || a2 < 0 || a2 >= K) {
      throw InputError("MatrixGame: action index out of range");
    }
    return payoff[static_cast<std::size_t>(a1) * K + a2];
  }
};

// One zero-mean GP function sample over the K x K index grid (joint input
// (a1, a2) as a 2-coordinate point), drawn via a factorization of the full
// grid kernel matrix with 1e-9 jitter. Raw values, no rescaling.
std::vector<double> sample_gp_grid(int K, const KernelSpec& kernel,
                                   std::uint64_t seed);

// Kernel matrix over the K^2 grid points; OpenMP over rows, plus the serial
// reference kept for testing.
std::vector<double> grid_kernel_matrix(int K, const KernelSpec& kernel);
std::vector<double> grid_kernel_matrix_serial(int K, const KernelSpec& kernel);

// Samples a table and min-max rescales it into [0, 1]. A degenerate sample
// (max - min < 1e-9) becomes the constant 0.5 table.
MatrixGame sample_matrix_game(int K, const KernelSpec& kernel,
                              std::uint64_t seed);

}  // namespace gpmw

#endif  // GPMW_MATRIX_GAME_HPP_
