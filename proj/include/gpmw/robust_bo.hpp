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

#ifndef GPMW_ROBUST_BO_HPP_
#define GPMW_ROBUST_BO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "gpmw/common.hpp"

namespace gpmw {

// Player-vs-adversary game on bilinear rewards: the player picks a feature
// profile m, the adversary (simultaneously) picks a latent profile u_i, the
// player sees the adversary's index and a noisy reward. Rewards are min-max
// rescaled to [0,1] over the full table before play.
class RobustBoGame {
 public:
  RobustBoGame(std::vector<std::vector<double>> own_profiles,
               std::vector<std::vector<double>> adversary_profiles,
               double noise_std);

  // Seeded generator: entries uniform on [0,1], rows L2-normalized.
  static RobustBoGame synthetic(int own_count, int adversary_count, int dim,
                                std::uint64_t seed, double noise_std);
  // Delimiter-separated values, one row per profile, dim columns of reals.
  static RobustBoGame from_files(const std::string& own_path,
                                 const std::string& adversary_path,
                                 double noise_std);

  int own_count() const { return static_cast<int>(own_.size()); }
  int adversary_count() const { return static_cast<int>(adv_.size()); }
  int dim() const { return dim_; }
  double noise_std() const { return noise_std_; }
  double rescale_min() const { return rescale_min_; }
  double rescale_max() const { return rescale_max_; }

  // Rescaled true reward.
  double reward(int own, int adversary) const;

  struct RoundResult {
    double noisy_reward = 0.0;
    int adversary_index = 0;  // revealed after the simultaneous move
  };
  RoundResult play(int own, int adversary, Rng& noise_rng) const;

  // GP input encoding: (own feature vector, adversary index) — dim + 1
  // coordinates, matching a product kernel of a linear factor on the
  // features and a near-diagonal factor on the index.
  std::vector<double> encode(int own, int adversary) const;
  // All own x adversary encodings, own-major (selection-rule grids).
  std::vector<std::vector<double>> encode_grid() const;

 private:
  std::vector<std::vector<double>> own_;
  std::vector<std::vector<double>> adv_;
  std::vector<double> table_;  // own-major rescaled rewards
  int dim_ = 0;
  double noise_std_ = 0.0;
  double rescale_min_ = 0.0;
  double rescale_max_ = 1.0;
};

// Parses a DSV matrix file (whitespace, comma or semicolon separated).
std::vector<std::vector<double>> load_feature_table(const std::string& path);

}  // namespace gpmw

#endif  // GPMW_ROBUST_BO_HPP_
