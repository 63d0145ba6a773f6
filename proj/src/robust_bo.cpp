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

#include "gpmw/robust_bo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gpmw {

RobustBoGame::RobustBoGame(std::vector<std::vector<double>> own_profiles,
                           std::vector<std::vector<double>> adversary_profiles,
                           double noise_std)
    : own_(std::move(own_profiles)),
      adv_(std::move(adversary_profiles)),
      noise_std_(noise_std) {
  if (own_.empty() || adv_.empty()) {
    throw ConfigError("RobustBoGame: empty profile set");
  }
  if (noise_std_ < 0.0) {
    throw ConfigError("RobustBoGame: noise std must be nonnegative");
  }
  dim_ = static_cast<int>(own_.front().size());
  for (const auto& row : own_) {
    if (static_cast<int>(row.size()) != dim_ || !all_finite(row)) {
      throw ConfigError("RobustBoGame: ragged or non-finite own profiles");
    }
  }
  for (const auto& row : adv_) {
    if (static_cast<int>(row.size()) != dim_ || !all_finite(row)) {
      throw ConfigError("RobustBoGame: ragged or non-finite adversary profiles");
    }
  }
  table_.resize(own_.size() * adv_.size());
  for (std::size_t m = 0; m < own_.size(); ++m) {
    for (std::size_t u = 0; u < adv_.size(); ++u) {
      double dot = 0.0;
      for (int d = 0; d < dim_; ++d) dot += own_[m][d] * adv_[u][d];
      table_[m * adv_.size() + u] = dot;
    }
  }
  auto [mn, mx] = std::minmax_element(table_.begin(), table_.end());
  rescale_min_ = *mn;
  rescale_max_ = *mx;
  const double spread = *mx - *mn;
  if (spread < 1e-12) {
    std::fill(table_.begin(), table_.end(), 0.5);
  } else {
    for (double& v : table_) v = (v - rescale_min_) / spread;
  }
}

RobustBoGame RobustBoGame::synthetic(int own_count, int adversary_count,
                                     int dim, std::uint64_t seed,
                                     double noise_std) {
  if (own_count < 1 || adversary_count < 1 || dim < 1) {
    throw ConfigError("RobustBoGame::synthetic: counts must be positive");
  }
  Rng rng(seed);
  auto draw = [&](int rows) {
    std::vector<std::vector<double>> out(rows, std::vector<double>(dim));
    for (auto& row : out) {
      double norm2 = 0.0;
      for (double& v : row) {
        v = rng.uniform01();
        norm2 += v * v;
      }
      const double norm = std::sqrt(norm2);
      if (norm > 0.0) {
        for (double& v : row) v /= norm;
      }
    }
    return out;
  };
  auto own = draw(own_count);
  auto adv = draw(adversary_count);
  return RobustBoGame(std::move(own), std::move(adv), noise_std);
}

std::vector<std::vector<double>> load_feature_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open feature table: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& c : line) {
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    }
    std::istringstream row(line);
    std::vector<double> vals;
    double v;
    while (row >> v) vals.push_back(v);
    if (vals.empty()) continue;
    if (!rows.empty() && vals.size() != rows.front().size()) {
      std::ostringstream os;
      os << "feature table " << path << ": ragged row at line " << line_no;
      throw ConfigError(os.str());
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw ConfigError("feature table is empty: " + path);
  return rows;
}

RobustBoGame RobustBoGame::from_files(const std::string& own_path,
                                      const std::string& adversary_path,
                                      double noise_std) {
  auto own = load_feature_table(own_path);
  auto adv = load_feature_table(adversary_path);
  if (own.front().size() != adv.front().size()) {
    throw ConfigError("feature tables have mismatched dimensions");
  }
  return RobustBoGame(std::move(own), std::move(adv), noise_std);
}

double RobustBoGame::reward(int own, int adversary) const {
  if (own < 0 || own >= own_count() || adversary < 0 ||
      adversary >= adversary_count()) {
    throw InputError("RobustBoGame: action index out of range");
  }
  return table_[static_cast<std::size_t>(own) * adv_.size() + adversary];
}

RobustBoGame::RoundResult RobustBoGame::play(int own, int adversary,
                                             Rng& noise_rng) const {
  RoundResult r;
  r.noisy_reward = reward(own, adversary) + noise_std_ * noise_rng.normal();
  r.adversary_index = adversary;
  return r;
}

std::vector<double> RobustBoGame::encode(int own, int adversary) const {
  if (own < 0 || own >= own_count() || adversary < 0 ||
      adversary >= adversary_count()) {
    throw InputError("RobustBoGame::encode: index out of range");
  }
  std::vector<double> x = own_[own];
  x.push_back(static_cast<double>(adversary));
  return x;
}

std::vector<std::vector<double>> RobustBoGame::encode_grid() const {
  std::vector<std::vector<double>> grid;
  grid.reserve(static_cast<std::size_t>(own_count()) * adversary_count());
  for (int m = 0; m < own_count(); ++m) {
    for (int u = 0; u < adversary_count(); ++u) {
      grid.push_back(encode(m, u));
    }
  }
  return grid;
}

}  // namespace gpmw
