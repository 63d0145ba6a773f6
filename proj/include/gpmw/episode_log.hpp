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

#ifndef GPMW_EPISODE_LOG_HPP_
#define GPMW_EPISODE_LOG_HPP_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gpmw/common.hpp"

namespace gpmw {

// Exact hindsight regret bookkeeping for one agent (the harness records
// true, noiseless rewards as an omniscient observer): cached per-action
// cumulative counterfactual sums, realized cumulative reward, and the
// cumulative regret max_a sum_s r(a, a_s^{-i}) - sum_s r(a_s).
class RegretLedger {
 public:
  explicit RegretLedger(int num_actions);

  // counterfactual[a] = true reward had the agent played a this round, with
  // everyone else's actions fixed. counterfactual[played] is the realized one.
  void record(int played, std::span<const double> counterfactual);

  int rounds() const { return static_cast<int>(regret_.size()); }
  double cumulative_regret() const;
  double realized_total() const { return realized_; }
  const std::vector<double>& cumulative_counterfactuals() const { return cum_; }
  // Cumulative regret after each recorded round.
  const std::vector<double>& regret_series() const { return regret_; }
  // R(t)/t.
  std::vector<double> time_averaged_regret() const;

 private:
  std::vector<double> cum_;
  double realized_ = 0.0;
  std::vector<double> regret_;
};

// One repeat's full record: ordered metadata, one row per (round, agent),
// optional strategy snapshots. Serialization round-trips byte-identically.
struct EpisodeLog {
  struct Row {
    int round = 0;
    int agent = 0;
    int action = 0;
    double true_reward = 0.0;
    double noisy_reward = 0.0;
    double regret = 0.0;  // cumulative, through this round
    bool has_congestion = false;
    double congestion = 0.0;
  };
  struct StrategyRow {
    int round = 0;
    int agent = 0;
    int action = 0;
    double weight = 0.0;
  };

  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<Row> rows;
  std::vector<StrategyRow> strategies;

  void set_meta(const std::string& key, const std::string& value);
  std::string meta_value(const std::string& key) const;  // "" when absent

  std::string serialize() const;
  static EpisodeLog deserialize(const std::string& text);
  void save(const std::string& path) const;
  static EpisodeLog load(const std::string& path);
};

// Round-trip-exact formatting for doubles (shortest form that parses back).
std::string format_double(double v);

}  // namespace gpmw

#endif  // GPMW_EPISODE_LOG_HPP_
