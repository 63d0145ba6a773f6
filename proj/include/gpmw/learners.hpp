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

#ifndef GPMW_LEARNERS_HPP_
#define GPMW_LEARNERS_HPP_

#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpmw/common.hpp"
#include "gpmw/posterior.hpp"

namespace gpmw {

// Probability weights over a finite action set. Updates keep the weights on
// the simplex (sum 1 within 1e-12, strictly positive after an exponential
// update with finite estimates).
struct MixedStrategy {
  std::vector<double> weights;
  int size() const { return static_cast<int>(weights.size()); }
};

MixedStrategy uniform_strategy(int k);

// Inverse-CDF sample from the weight list using the caller's generator.
int sample_index(const MixedStrategy& strategy, Rng& rng);

// Exponential reweighting with losses (1 - estimate); estimates must lie in
// [0,1] (callers clip first). Output is normalized onto the simplex.
MixedStrategy mw_update(const MixedStrategy& strategy,
                        std::span<const double> reward_estimates, double eta);

// sqrt(8 log K / T); requires K >= 2.
double eta_schedule(int K, int T);
// Continuous-set variant: sqrt(8 d log(L b sqrt(d T)) / T).
double eta_schedule_box(double b, int d, double lipschitz, int T);

// Finite list of action coordinate profiles (non-empty, duplicate-free).
struct ActionSet {
  std::vector<std::vector<double>> points;
  int size() const { return static_cast<int>(points.size()); }
};

// Uniform cell-center grid over [0,b]^d with ceil(L b sqrt(d T)) points per
// axis; every box point has a grid point within l1 distance sqrt(d/T)/L.
// Throws CapacityError when the grid would exceed `budget` points.
ActionSet discretize_box(double b, int d, double lipschitz, int T,
                         long long budget = 2000000);

// Optimistic reward estimates: clip(UCB(candidate), 0, 1) per candidate.
// candidates[a] is the joint-outcome encoding of own action a against the
// observed opponent profile.
std::vector<double> optimistic_rewards(
    const GpPosterior& gp, double beta,
    const std::vector<std::vector<double>>& candidates);
// Convenience overload: joint encoding = concat(own profile, opponent).
std::vector<double> optimistic_rewards(const GpPosterior& gp, double beta,
                                       const ActionSet& actions,
                                       std::span<const double> opponent_profile);

// Per-round feedback, delivered at the start of the next step() call. Which
// fields are populated depends on the learner variant's feedback channel.
struct Observation {
  double noisy_reward = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> full_rewards;                   // hedge channel
  std::vector<double> played_point;                   // gp encoding, realized outcome
  std::vector<std::vector<double>> candidate_points;  // gp encodings vs observed opponent
};

// Common step interface. step() is called once per round: the first call has
// no observation, every later call carries the previous round's feedback and
// returns the index of the action to play this round. Learners are pure
// functions of (seed, observation history).
class Learner {
 public:
  virtual ~Learner() = default;
  virtual int num_actions() const = 0;
  virtual int step(const Observation* obs) = 0;
  virtual std::span<const double> strategy() const { return {}; }
  virtual std::string variant() const = 0;
};

struct GpMwConfig {
  KernelSpec kernel;
  double model_noise_std = 0.1;
  ConfidenceSchedule schedule;
  std::optional<double> fixed_beta;  // overrides the schedule when set
  double eta = 0.1;
  double prior_mean = 0.0;
};

// GP-driven multiplicative-weights learner. Per round (after the first):
// builds optimistic estimates against the just-observed opponent profile
// from the pre-append posterior (beta uses the information gain of rounds
// 1..t-1), applies the MW update, appends the realized outcome, then samples
// the next action.
class GpMwLearner : public Learner {
 public:
  GpMwLearner(int num_actions, GpMwConfig config, std::uint64_t seed);
  // Warm start from an existing posterior (e.g. one already trained on
  // known outcomes); the kernel/noise inside `posterior` win.
  GpMwLearner(int num_actions, GpMwConfig config, std::uint64_t seed,
              GpPosterior posterior);

  int num_actions() const override { return k_; }
  int step(const Observation* obs) override;
  std::span<const double> strategy() const override {
    return strategy_.weights;
  }
  std::string variant() const override { return "gp-mw"; }

  const GpPosterior& posterior() const { return gp_; }
  double current_beta() const;

 private:
  int k_;
  GpMwConfig config_;
  GpPosterior gp_;
  MixedStrategy strategy_;
  Rng rng_;
  int round_ = 0;
};

// Full-information Hedge: the MW update consumes the true reward vector.
class HedgeLearner : public Learner {
 public:
  HedgeLearner(int num_actions, double eta, std::uint64_t seed);

  int num_actions() const override { return k_; }
  int step(const Observation* obs) override;
  std::span<const double> strategy() const override {
    return strategy_.weights;
  }
  std::string variant() const override { return "hedge"; }

 private:
  int k_;
  double eta_;
  MixedStrategy strategy_;
  Rng rng_;
  int round_ = 0;
};

struct Exp3pConfig {
  // Defaults derived from (K, T, delta) when unset; see make_default.
  double gamma_mix = 0.0;  // uniform exploration share
  double eta = 0.0;        // learning rate on cumulative gains
  double bonus = 0.0;      // high-probability bonus coefficient
  double delta = 0.05;

  static Exp3pConfig make_default(int K, int T, double delta = 0.05);
};

// Exp3.P bandit baseline: importance-weighted gains plus a per-arm
// confidence bonus, softmax with uniform exploration mixing.
class Exp3pLearner : public Learner {
 public:
  Exp3pLearner(int num_actions, Exp3pConfig config, std::uint64_t seed);

  int num_actions() const override { return k_; }
  int step(const Observation* obs) override;
  std::span<const double> strategy() const override { return probs_; }
  std::string variant() const override { return "exp3p"; }

 private:
  void refresh_probs();

  int k_;
  Exp3pConfig config_;
  std::vector<double> gains_;
  std::vector<double> probs_;
  Rng rng_;
  int round_ = 0;
  int last_action_ = -1;
  double last_prob_ = 1.0;
};

enum class SelectRule {
  kMaxMax,  // argmax_m max_i UCB(m, i); imputed i = argmax_i UCB(m, i)
  kMaxMin,  // argmax_m min_i UCB(m, i); imputed i = argmin_i LCB(m, i)
};

struct GpSelectConfig {
  KernelSpec kernel;
  double model_noise_std = 0.1;
  ConfidenceSchedule schedule;
  std::optional<double> fixed_beta;
  SelectRule rule = SelectRule::kMaxMax;
};

// Deterministic confidence-bound selection over a fixed own x adversary
// candidate grid (GP-UCB and StableOpt rules). Updates its posterior at
// (chosen own action, imputed adversary index) with the observed noisy
// reward. Ties break toward the lowest index.
class GpSelectLearner : public Learner {
 public:
  // grid_points has own_count * adversary_count rows, own-major.
  GpSelectLearner(int own_count, int adversary_count,
                  std::vector<std::vector<double>> grid_points,
                  GpSelectConfig config);

  int num_actions() const override { return own_count_; }
  int step(const Observation* obs) override;
  std::string variant() const override {
    return config_.rule == SelectRule::kMaxMax ? "gp-ucb" : "stableopt";
  }

  int last_imputed_adversary() const { return last_imputed_; }
  const GpPosterior& posterior() const { return gp_; }

 private:
  int own_count_;
  int adv_count_;
  GpSelectConfig config_;
  GpPosterior gp_;
  std::vector<std::vector<double>> grid_;
  FixedQueryPredictor predictor_;
  int last_own_ = -1;
  int last_imputed_ = -1;
  int round_ = 0;
};

// Stand-alone forms of the selection rules (used by tests and by callers
// that keep their own posterior): returns (own index, imputed adversary
// index) for the given rule over encode(own, adv) candidates.
std::pair<int, int> gpucb_select(const GpPosterior& gp, double beta,
                                 const std::vector<std::vector<double>>& grid,
                                 int own_count, int adversary_count);
std::pair<int, int> stableopt_select(
    const GpPosterior& gp, double beta,
    const std::vector<std::vector<double>>& grid, int own_count,
    int adversary_count);

class UniformRandomLearner : public Learner {
 public:
  UniformRandomLearner(int num_actions, std::uint64_t seed)
      : k_(num_actions), rng_(seed) {
    if (k_ < 1) throw ConfigError("uniform-random: need at least one action");
  }
  int num_actions() const override { return k_; }
  int step(const Observation*) override { return rng_.uniform_index(k_); }
  std::string variant() const override { return "uniform-random"; }

 private:
  int k_;
  Rng rng_;
};

// Plays one fixed action forever (non-learning routing agents).
class FixedActionLearner : public Learner {
 public:
  FixedActionLearner(int num_actions, int action)
      : k_(num_actions), action_(action) {
    if (action < 0 || action >= num_actions) {
      throw ConfigError("fixed: action index out of range");
    }
  }
  int num_actions() const override { return k_; }
  int step(const Observation*) override { return action_; }
  std::string variant() const override { return "fixed"; }

 private:
  int k_;
  int action_;
};

}  // namespace gpmw

#endif  // GPMW_LEARNERS_HPP_
