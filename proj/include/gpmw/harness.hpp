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

#ifndef GPMW_HARNESS_HPP_
#define GPMW_HARNESS_HPP_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gpmw/episode_log.hpp"
#include "gpmw/kernel.hpp"
#include "gpmw/learners.hpp"

namespace gpmw {

// Per-agent learner assignment. Unset optionals fall back to schedule
// defaults derived from (K, T) or to environment-provided values.
struct LearnerSetup {
  std::string variant = "uniform-random";
  std::optional<KernelSpec> kernel;  // gp variants; else environment default
  double rkhs_bound = 1.0;
  double delta = 0.1;
  double model_noise_std = -1.0;  // < 0: use the environment's noise std
  std::optional<double> fixed_beta;
  std::optional<double> eta;
  std::optional<double> exp3p_gamma;
  std::optional<double> exp3p_eta;
  std::optional<double> exp3p_bonus;
  double exp3p_delta = 0.05;
  int fixed_action = 0;
};

struct MatrixEnvSetup {
  int num_actions = 30;
  double noise_std = 1.0;
  KernelSpec kernel = KernelSpec::se(6.0);
};

struct RoutingEnvSetup {
  std::string network_file;
  std::string trips_file;
  double time_scale = 1.0;
  int max_routes = 5;
  int learning_agents = 0;
  int bound_samples = 10000;
  bool normalize_by_capacity = true;
};

struct RobustBoEnvSetup {
  int own_count = 200;
  int adversary_count = 50;
  int dim = 15;
  double noise_std = 0.1;
  std::string own_file;        // empty: seeded synthetic profiles
  std::string adversary_file;  // empty: seeded synthetic profiles
  LearnerSetup adversary;      // player 1
};

// Grid-search candidates for offline hyperparameter fitting.
struct FitSetup {
  int agent = 0;
  int sample_count = 200;
  std::vector<double> lengthscales;  // plain kernels
  struct FactorCandidates {
    std::vector<double> lengthscales;
    std::vector<int> degrees;  // polynomial factors; subset of {2, 4, 6}
  };
  std::vector<FactorCandidates> factors;  // product kernels
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string env_type;  // "matrix" | "routing" | "robust-bo"
  int horizon = 100;
  int repeats = 1;
  std::uint64_t base_seed = 1;
  int strategy_cadence = 0;  // 0: no snapshots
  MatrixEnvSetup matrix;
  RoutingEnvSetup routing;
  RobustBoEnvSetup robust;
  std::vector<LearnerSetup> players;  // matrix: both players; robust-bo: player 0
  LearnerSetup routing_learner;       // routing: the learning subset
  std::string out_dir = "out";
};

// Environments behind one round-based interface. begin_round() evaluates a
// joint action profile; the accessors then answer for that outcome.
// Stateless across rounds apart from the cached outcome; safe for
// concurrent const access between begin_round calls.
class EnvInstance {
 public:
  virtual ~EnvInstance() = default;
  virtual int num_agents() const = 0;
  virtual int num_actions(int agent) const = 0;
  virtual void begin_round(std::span<const int> actions) = 0;
  virtual double true_reward(int agent) const = 0;
  // True reward for every own action, others' actions fixed (regret + hedge).
  virtual std::vector<double> counterfactuals(int agent) const = 0;
  // GP joint-outcome encodings (feedback: own reward + opponents' actions or
  // their aggregate).
  virtual std::vector<double> encode_outcome(int agent) const = 0;
  virtual std::vector<std::vector<double>> encode_candidates(int agent) const = 0;
  virtual double noise_std(int agent) const = 0;
  virtual KernelSpec default_kernel(int agent) const = 0;
  virtual bool has_congestion() const { return false; }
  virtual double congestion() const { return 0.0; }
  // own x adversary encodings for the selection-rule learners (2-player
  // environments only).
  virtual std::vector<std::vector<double>> selection_grid(int agent) const;
  virtual void add_meta(EpisodeLog& log) const;
  virtual std::string variant_of(int agent) const = 0;
};

// Builds the repeat-specific environment (matrix games sample a fresh payoff
// table per repeat; routing and robust-bo share structure across repeats).
std::unique_ptr<EnvInstance> make_env_instance(const ExperimentConfig& config,
                                               int repeat);

// Runs every repeat (seeds derived from base_seed + repeat index) and
// returns one log per repeat. Deterministic given the config.
std::vector<EpisodeLog> run_experiment(const ExperimentConfig& config);
EpisodeLog run_repeat(const ExperimentConfig& config, int repeat);

// Time-averaged regret series R(t)/t from a ledger.
std::vector<double> regret_series(const RegretLedger& ledger);

// Cross-repeat aggregation of the tracked series.
struct SeriesStats {
  std::vector<double> mean;
  std::vector<double> sd;
};
struct Summary {
  int horizon = 0;
  int repeats = 0;
  // Per learner variant: time-averaged regret, averaged over that variant's
  // agents within a repeat, mean +- sd across repeats.
  std::map<std::string, SeriesStats> regret;
  std::map<std::string, double> final_regret_mean;
  std::map<std::string, double> final_regret_sd;
  std::optional<SeriesStats> congestion;
  double final_congestion_mean = 0.0;
  double final_congestion_sd = 0.0;
  double mean_congestion_mean = 0.0;  // time-averaged congestion
  double mean_congestion_sd = 0.0;
};
Summary summarize(const std::vector<EpisodeLog>& logs);

// Writes summary.json and per-series plot files (round, mean, sd) into dir.
void write_summary_files(const Summary& summary, const std::string& dir);

// Offline maximum-likelihood grid search over declared kernel candidates,
// fit on sampled random outcomes of the target agent. Returns the winning
// spec (ties break toward the first candidate).
KernelSpec fit_hyperparameters(const ExperimentConfig& config,
                               const FitSetup& fit, std::uint64_t seed);

}  // namespace gpmw

#endif  // GPMW_HARNESS_HPP_
