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

#include "gpmw/learners.hpp"

#include <algorithm>
#include <cmath>

namespace gpmw {

MixedStrategy uniform_strategy(int k) {
  if (k < 1) throw ConfigError("uniform_strategy: need at least one action");
  return {std::vector<double>(k, 1.0 / k)};
}

int sample_index(const MixedStrategy& strategy, Rng& rng) {
  const double u = rng.uniform01();
  double cum = 0.0;
  const int k = strategy.size();
  for (int i = 0; i < k; ++i) {
    cum += strategy.weights[i];
    if (u < cum) return i;
  }
  return k - 1;
}

MixedStrategy mw_update(const MixedStrategy& strategy,
                        std::span<const double> reward_estimates, double eta) {
  const int k = strategy.size();
  if (static_cast<int>(reward_estimates.size()) != k) {
    throw InputError("mw_update: estimate count does not match action count");
  }
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw InputError("mw_update: eta must be finite and nonnegative");
  }
  MixedStrategy next;
  next.weights.resize(k);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    const double r = reward_estimates[i];
    if (!(r >= 0.0 && r <= 1.0)) {
      throw InputError("mw_update: reward estimate outside [0, 1]");
    }
    const double w = strategy.weights[i] * std::exp(-eta * (1.0 - r));
    next.weights[i] = w;
    total += w;
  }
  if (!(total > 0.0)) {
    throw NumericalError("mw_update: weights collapsed to zero");
  }
  for (double& w : next.weights) w /= total;
  return next;
}

double eta_schedule(int K, int T) {
  if (K < 2) throw ConfigError("eta_schedule: need K >= 2");
  if (T < 1) throw ConfigError("eta_schedule: need T >= 1");
  return std::sqrt(8.0 * std::log(static_cast<double>(K)) / T);
}

double eta_schedule_box(double b, int d, double lipschitz, int T) {
  if (!(b > 0.0) || d < 1 || !(lipschitz > 0.0) || T < 1) {
    throw ConfigError("eta_schedule_box: parameters must be positive");
  }
  const double m = lipschitz * b * std::sqrt(static_cast<double>(d) * T);
  return std::sqrt(8.0 * d * std::log(m) / T);
}

ActionSet discretize_box(double b, int d, double lipschitz, int T,
                         long long budget) {
  if (!(b > 0.0) || d < 1 || !(lipschitz > 0.0) || T < 1) {
    throw ConfigError("discretize_box: parameters must be positive");
  }
  const long long per_axis = static_cast<long long>(
      std::ceil(lipschitz * b * std::sqrt(static_cast<double>(d) * T)));
  const long long m = std::max<long long>(per_axis, 1);
  long long total = 1;
  for (int i = 0; i < d; ++i) {
    if (total > budget / m) {
      throw CapacityError("discretize_box: grid size exceeds budget");
    }
    total *= m;
  }
  ActionSet set;
  set.points.reserve(static_cast<std::size_t>(total));
  std::vector<int> idx(d, 0);
  const double cell = b / static_cast<double>(m);
  for (long long n = 0; n < total; ++n) {
    std::vector<double> p(d);
    for (int i = 0; i < d; ++i) p[i] = (idx[i] + 0.5) * cell;
    set.points.push_back(std::move(p));
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[i] < m) break;
      idx[i] = 0;
    }
  }
  return set;
}

std::vector<double> optimistic_rewards(
    const GpPosterior& gp, double beta,
    const std::vector<std::vector<double>>& candidates) {
  auto preds = predict_batch(gp, candidates);
  std::vector<double> est(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    double u = preds[i].mean + beta * preds[i].stddev;
    est[i] = std::clamp(u, 0.0, 1.0);
  }
  return est;
}

std::vector<double> optimistic_rewards(const GpPosterior& gp, double beta,
                                       const ActionSet& actions,
                                       std::span<const double> opponent_profile) {
  std::vector<std::vector<double>> candidates;
  candidates.reserve(actions.points.size());
  for (const auto& own : actions.points) {
    std::vector<double> joint(own.begin(), own.end());
    joint.insert(joint.end(), opponent_profile.begin(), opponent_profile.end());
    candidates.push_back(std::move(joint));
  }
  return optimistic_rewards(gp, beta, candidates);
}

// -- GpMwLearner --------------------------------------------------------------

GpMwLearner::GpMwLearner(int num_actions, GpMwConfig config, std::uint64_t seed)
    : k_(num_actions),
      config_(config),
      gp_(config.kernel, config.model_noise_std * config.model_noise_std,
          config.prior_mean),
      strategy_(uniform_strategy(num_actions)),
      rng_(seed) {
  if (k_ < 1) throw ConfigError("gp-mw: need at least one action");
  if (!(config_.eta > 0.0)) throw ConfigError("gp-mw: eta must be positive");
}

GpMwLearner::GpMwLearner(int num_actions, GpMwConfig config,
                         std::uint64_t seed, GpPosterior posterior)
    : k_(num_actions),
      config_(config),
      gp_(std::move(posterior)),
      strategy_(uniform_strategy(num_actions)),
      rng_(seed) {
  if (k_ < 1) throw ConfigError("gp-mw: need at least one action");
  if (!(config_.eta > 0.0)) throw ConfigError("gp-mw: eta must be positive");
}

double GpMwLearner::current_beta() const {
  if (config_.fixed_beta) return *config_.fixed_beta;
  return beta(config_.schedule, gp_.info_gain());
}

int GpMwLearner::step(const Observation* obs) {
  if (round_ == 0) {
    if (obs != nullptr) {
      throw ProtocolError("gp-mw: unexpected observation before round 1");
    }
  } else {
    if (obs == nullptr) {
      throw ProtocolError("gp-mw: missing observation after round 1");
    }
    if (static_cast<int>(obs->candidate_points.size()) != k_) {
      throw ProtocolError("gp-mw: candidate count does not match action count");
    }
    // Estimates come from the pre-append posterior (the observation being
    // folded in belongs to the round the estimates score).
    const double b = current_beta();
    auto estimates = optimistic_rewards(gp_, b, obs->candidate_points);
    strategy_ = mw_update(strategy_, estimates, config_.eta);
    gp_.append(obs->played_point, obs->noisy_reward);
  }
  ++round_;
  return sample_index(strategy_, rng_);
}

// -- HedgeLearner -------------------------------------------------------------

HedgeLearner::HedgeLearner(int num_actions, double eta, std::uint64_t seed)
    : k_(num_actions),
      eta_(eta),
      strategy_(uniform_strategy(num_actions)),
      rng_(seed) {
  if (k_ < 1) throw ConfigError("hedge: need at least one action");
}

int HedgeLearner::step(const Observation* obs) {
  if (round_ == 0) {
    if (obs != nullptr) {
      throw ProtocolError("hedge: unexpected observation before round 1");
    }
  } else {
    if (obs == nullptr) {
      throw ProtocolError("hedge: missing observation after round 1");
    }
    strategy_ = mw_update(strategy_, obs->full_rewards, eta_);
  }
  ++round_;
  return sample_index(strategy_, rng_);
}

// -- Exp3pLearner -------------------------------------------------------------

Exp3pConfig Exp3pConfig::make_default(int K, int T, double delta) {
  Exp3pConfig c;
  c.delta = delta;
  const double k = static_cast<double>(std::max(K, 1));
  const double t = static_cast<double>(std::max(T, 1));
  const double logk = std::log(std::max(k, 2.0));
  c.gamma_mix = std::min(1.0, std::sqrt(k * logk / ((M_E - 1.0) * t)));
  c.eta = 0.95 * std::sqrt(logk / (t * k));
  c.bonus = std::sqrt(std::log(k / delta) / (k * t));
  return c;
}

Exp3pLearner::Exp3pLearner(int num_actions, Exp3pConfig config,
                           std::uint64_t seed)
    : k_(num_actions),
      config_(config),
      gains_(num_actions, 0.0),
      probs_(num_actions, 1.0 / num_actions),
      rng_(seed) {
  if (k_ < 1) throw ConfigError("exp3p: need at least one action");
  refresh_probs();
}

void Exp3pLearner::refresh_probs() {
  double gmax = gains_[0];
  for (double g : gains_) gmax = std::max(gmax, g);
  double total = 0.0;
  for (int i = 0; i < k_; ++i) {
    probs_[i] = std::exp(config_.eta * (gains_[i] - gmax));
    total += probs_[i];
  }
  for (int i = 0; i < k_; ++i) {
    probs_[i] = (1.0 - config_.gamma_mix) * probs_[i] / total +
                config_.gamma_mix / k_;
  }
}

int Exp3pLearner::step(const Observation* obs) {
  if (round_ == 0) {
    if (obs != nullptr) {
      throw ProtocolError("exp3p: unexpected observation before round 1");
    }
  } else {
    if (obs == nullptr) {
      throw ProtocolError("exp3p: missing observation after round 1");
    }
    const double r = obs->noisy_reward;
    if (!(r >= 0.0 && r <= 1.0)) {
      throw InputError("exp3p: reward outside [0, 1]");
    }
    for (int i = 0; i < k_; ++i) {
      double gain = config_.bonus / probs_[i];
      if (i == last_action_) gain += r / last_prob_;
      gains_[i] += gain;
    }
    refresh_probs();
  }
  ++round_;
  MixedStrategy s{probs_};
  last_action_ = sample_index(s, rng_);
  last_prob_ = probs_[last_action_];
  return last_action_;
}

// -- Selection rules ----------------------------------------------------------

namespace {

std::pair<int, int> select_from_bounds(std::span<const double> ucb_grid,
                                       std::span<const double> lcb_grid,
                                       int own_count, int adv_count,
                                       SelectRule rule) {
  int best_own = 0, best_imputed = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int m = 0; m < own_count; ++m) {
    const double* row = &ucb_grid[static_cast<std::size_t>(m) * adv_count];
    int arg = 0;
    double val = row[0];
    if (rule == SelectRule::kMaxMax) {
      for (int i = 1; i < adv_count; ++i) {
        if (row[i] > val) {
          val = row[i];
          arg = i;
        }
      }
    } else {
      for (int i = 1; i < adv_count; ++i) {
        if (row[i] < val) {
          val = row[i];
          arg = i;
        }
      }
    }
    if (val > best_val) {
      best_val = val;
      best_own = m;
      best_imputed = arg;
    }
  }
  if (rule == SelectRule::kMaxMin) {
    // StableOpt imputes the adversary via the LCB at the chosen action.
    const double* row = &lcb_grid[static_cast<std::size_t>(best_own) * adv_count];
    int arg = 0;
    double val = row[0];
    for (int i = 1; i < adv_count; ++i) {
      if (row[i] < val) {
        val = row[i];
        arg = i;
      }
    }
    best_imputed = arg;
  }
  return {best_own, best_imputed};
}

std::pair<int, int> select_dense(const GpPosterior& gp, double beta,
                                 const std::vector<std::vector<double>>& grid,
                                 int own_count, int adv_count, SelectRule rule) {
  if (own_count < 1 || adv_count < 1) {
    throw ConfigError("selection: empty action set");
  }
  if (static_cast<int>(grid.size()) != own_count * adv_count) {
    throw InputError("selection: grid size mismatch");
  }
  auto preds = predict_batch(gp, grid);
  std::vector<double> u(preds.size()), l(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    u[i] = preds[i].mean + beta * preds[i].stddev;
    l[i] = preds[i].mean - beta * preds[i].stddev;
  }
  return select_from_bounds(u, l, own_count, adv_count, rule);
}

}  // namespace

std::pair<int, int> gpucb_select(const GpPosterior& gp, double beta,
                                 const std::vector<std::vector<double>>& grid,
                                 int own_count, int adversary_count) {
  return select_dense(gp, beta, grid, own_count, adversary_count,
                      SelectRule::kMaxMax);
}

std::pair<int, int> stableopt_select(
    const GpPosterior& gp, double beta,
    const std::vector<std::vector<double>>& grid, int own_count,
    int adversary_count) {
  return select_dense(gp, beta, grid, own_count, adversary_count,
                      SelectRule::kMaxMin);
}

// -- GpSelectLearner ----------------------------------------------------------

GpSelectLearner::GpSelectLearner(int own_count, int adversary_count,
                                 std::vector<std::vector<double>> grid_points,
                                 GpSelectConfig config)
    : own_count_(own_count),
      adv_count_(adversary_count),
      config_(config),
      gp_(config.kernel, config.model_noise_std * config.model_noise_std),
      grid_(std::move(grid_points)),
      predictor_(gp_, grid_) {
  if (own_count_ < 1 || adv_count_ < 1) {
    throw ConfigError("gp-select: empty action set");
  }
  if (static_cast<int>(grid_.size()) != own_count_ * adv_count_) {
    throw ConfigError("gp-select: grid size mismatch");
  }
}

int GpSelectLearner::step(const Observation* obs) {
  if (round_ == 0) {
    if (obs != nullptr) {
      throw ProtocolError("gp-select: unexpected observation before round 1");
    }
  } else {
    if (obs == nullptr) {
      throw ProtocolError("gp-select: missing observation after round 1");
    }
    // The observed reward is attributed to the imputed adversary index.
    gp_.append(grid_[static_cast<std::size_t>(last_own_) * adv_count_ +
                     last_imputed_],
               obs->noisy_reward);
    predictor_.sync(gp_);
  }
  ++round_;

  const double b = config_.fixed_beta
                       ? *config_.fixed_beta
                       : beta(config_.schedule, gp_.info_gain());
  const std::size_t n = grid_.size();
  std::vector<double> u(n), l(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = predictor_.prediction(static_cast<int>(i));
    u[i] = p.mean + b * p.stddev;
    l[i] = p.mean - b * p.stddev;
  }
  auto [own, imputed] =
      select_from_bounds(u, l, own_count_, adv_count_, config_.rule);
  last_own_ = own;
  last_imputed_ = imputed;
  return own;
}

}  // namespace gpmw
