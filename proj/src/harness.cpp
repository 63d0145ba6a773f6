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

#include "gpmw/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gpmw/matrix_game.hpp"
#include "gpmw/robust_bo.hpp"
#include "gpmw/routing.hpp"

namespace gpmw {
namespace {

// Seed stream ids (see derive_seed): 1 noise, 2 matrix table, 3 synthetic
// profiles, 4 routing learning subset, 5 reward bounds, 6 fit sampling,
// 1000+i learner i.
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kMatrixStream = 2;
constexpr std::uint64_t kProfileStream = 3;
constexpr std::uint64_t kSubsetStream = 4;
constexpr std::uint64_t kBoundsStream = 5;
constexpr std::uint64_t kFitStream = 6;
constexpr std::uint64_t kLearnerStream = 1000;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::vector<std::vector<double>> EnvInstance::selection_grid(int) const {
  throw ConfigError("selection-rule learners are not supported in this environment");
}

void EnvInstance::add_meta(EpisodeLog&) const {}

// -- Matrix environment -------------------------------------------------------

namespace {

class MatrixEnv : public EnvInstance {
 public:
  MatrixEnv(const ExperimentConfig& config, int repeat)
      : config_(&config),
        game_(sample_matrix_game(
            config.matrix.num_actions, config.matrix.kernel,
            derive_seed(config.base_seed, repeat, kMatrixStream))) {}

  int num_agents() const override { return 2; }
  int num_actions(int) const override { return game_.K; }

  void begin_round(std::span<const int> actions) override {
    a0_ = actions[0];
    a1_ = actions[1];
  }

  double true_reward(int) const override { return game_.reward(a0_, a1_); }

  std::vector<double> counterfactuals(int agent) const override {
    std::vector<double> cf(game_.K);
    for (int m = 0; m < game_.K; ++m) {
      cf[m] = agent == 0 ? game_.reward(m, a1_) : game_.reward(a0_, m);
    }
    return cf;
  }

  std::vector<double> encode_outcome(int) const override {
    return {static_cast<double>(a0_), static_cast<double>(a1_)};
  }

  std::vector<std::vector<double>> encode_candidates(int agent) const override {
    std::vector<std::vector<double>> c;
    c.reserve(game_.K);
    for (int m = 0; m < game_.K; ++m) {
      if (agent == 0) {
        c.push_back({static_cast<double>(m), static_cast<double>(a1_)});
      } else {
        c.push_back({static_cast<double>(a0_), static_cast<double>(m)});
      }
    }
    return c;
  }

  double noise_std(int) const override { return config_->matrix.noise_std; }

  KernelSpec default_kernel(int) const override {
    return config_->matrix.kernel;
  }

  std::vector<std::vector<double>> selection_grid(int agent) const override {
    std::vector<std::vector<double>> grid;
    grid.reserve(static_cast<std::size_t>(game_.K) * game_.K);
    for (int own = 0; own < game_.K; ++own) {
      for (int other = 0; other < game_.K; ++other) {
        if (agent == 0) {
          grid.push_back({static_cast<double>(own), static_cast<double>(other)});
        } else {
          grid.push_back({static_cast<double>(other), static_cast<double>(own)});
        }
      }
    }
    return grid;
  }

  void add_meta(EpisodeLog& log) const override {
    log.set_meta("env", "matrix");
    log.set_meta("actions", std::to_string(game_.K));
    log.set_meta("rescale_min", format_double(game_.rescale_min));
    log.set_meta("rescale_max", format_double(game_.rescale_max));
  }

  std::string variant_of(int agent) const override {
    return config_->players.at(agent).variant;
  }

 private:
  const ExperimentConfig* config_;
  MatrixGame game_;
  int a0_ = 0;
  int a1_ = 0;
};

// -- Routing environment ------------------------------------------------------

class RoutingEnv : public EnvInstance {
 public:
  explicit RoutingEnv(const ExperimentConfig& config) : config_(&config) {
    const auto& rc = config.routing;
    game_ = std::make_unique<RoutingGame>(
        load_tntp(rc.network_file, rc.trips_file, rc.time_scale),
        rc.max_routes);
    scale_ = game_->estimate_bounds(
        rc.bound_samples, derive_seed(config.base_seed, 0, kBoundsStream));
    const int n = game_->num_agents();
    if (rc.learning_agents < 0 || rc.learning_agents > n) {
      throw ConfigError("routing.learning_agents out of range");
    }
    learning_.assign(n, 0);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(config.base_seed, 0, kSubsetStream));
    for (int i = n - 1; i > 0; --i) {
      std::swap(order[i], order[rng.uniform_index(i + 1)]);
    }
    for (int i = 0; i < rc.learning_agents; ++i) learning_[order[i]] = 1;
  }

  const RoutingGame& game() const { return *game_; }
  bool is_learning(int agent) const { return learning_[agent] != 0; }

  int num_agents() const override { return game_->num_agents(); }
  int num_actions(int agent) const override {
    return game_->agents()[agent].num_routes();
  }

  void begin_round(std::span<const int> actions) override {
    actions_.assign(actions.begin(), actions.end());
    loads_ = game_->edge_loads(actions_);
  }

  double scaled_reward(int agent, double travel_time) const {
    return std::max(0.0, 1.0 - travel_time / scale_.bound[agent]);
  }

  double true_reward(int agent) const override {
    auto psi = game_->occupancy_from_loads(loads_, agent, actions_[agent]);
    return scaled_reward(agent,
                         game_->agent_travel_time(agent, actions_[agent], psi));
  }

  std::vector<double> counterfactuals(int agent) const override {
    auto psi = game_->occupancy_from_loads(loads_, agent, actions_[agent]);
    const int k = num_actions(agent);
    std::vector<double> cf(k);
    for (int r = 0; r < k; ++r) {
      cf[r] = scaled_reward(agent, game_->agent_travel_time(agent, r, psi));
    }
    return cf;
  }

  std::vector<double> encode_route(int agent, int route,
                                   std::span<const double> psi) const {
    const auto& a = game_->agents()[agent];
    const std::size_t m = a.edge_subset.size();
    std::vector<double> x(2 * m, 0.0);
    for (int local : a.routes[route]) x[local] = a.units;
    for (std::size_t j = 0; j < m; ++j) x[m + j] = x[j] + psi[j];
    if (config_->routing.normalize_by_capacity) {
      for (std::size_t j = 0; j < m; ++j) {
        const double cap = game_->network().edges[a.edge_subset[j]].capacity;
        x[j] /= cap;
        x[m + j] /= cap;
      }
    }
    return x;
  }

  std::vector<double> encode_outcome(int agent) const override {
    auto psi = game_->occupancy_from_loads(loads_, agent, actions_[agent]);
    return encode_route(agent, actions_[agent], psi);
  }

  std::vector<std::vector<double>> encode_candidates(int agent) const override {
    auto psi = game_->occupancy_from_loads(loads_, agent, actions_[agent]);
    std::vector<std::vector<double>> c;
    const int k = num_actions(agent);
    c.reserve(k);
    for (int r = 0; r < k; ++r) c.push_back(encode_route(agent, r, psi));
    return c;
  }

  double noise_std(int) const override { return 0.001; }

  KernelSpec default_kernel(int agent) const override {
    // Composite: linear on the own-route profile, polynomial on the total
    // occupancy profile (own + others), on this agent's 2|E(i)| coordinates.
    const auto& a = game_->agents()[agent];
    const int m = static_cast<int>(a.edge_subset.size());
    KernelSpec k1 = KernelSpec::linear(1.0);
    KernelSpec k2 = KernelSpec::polynomial(4, 1.0, static_cast<double>(m));
    if (config_->routing_learner.kernel) {
      const auto& tmpl = *config_->routing_learner.kernel;
      if (tmpl.family != KernelFamily::kProduct || tmpl.factors.size() != 2) {
        throw ConfigError(
            "routing kernel template must be a product of two factors");
      }
      k1 = tmpl.factors[0].spec;
      k2 = tmpl.factors[1].spec;
    }
    std::vector<int> first(m), second(m);
    std::iota(first.begin(), first.end(), 0);
    std::iota(second.begin(), second.end(), m);
    return KernelSpec::product(
        {{k1, std::move(first)}, {k2, std::move(second)}});
  }

  bool has_congestion() const override { return true; }
  double congestion() const override { return game_->congestion(loads_); }

  void add_meta(EpisodeLog& log) const override {
    log.set_meta("env", "routing");
    log.set_meta("agents", std::to_string(num_agents()));
    std::ostringstream subset;
    bool first = true;
    for (int i = 0; i < num_agents(); ++i) {
      if (learning_[i]) {
        if (!first) subset << " ";
        subset << i;
        first = false;
      }
    }
    log.set_meta("learning_agents", subset.str());
  }

  std::string variant_of(int agent) const override {
    return learning_[agent] ? config_->routing_learner.variant : "fixed";
  }

 private:
  const ExperimentConfig* config_;
  std::unique_ptr<RoutingGame> game_;
  RoutingGame::RewardScale scale_;
  std::vector<char> learning_;
  std::vector<int> actions_;
  std::vector<double> loads_;
};

// -- Robust-BO environment ----------------------------------------------------

class RobustBoEnv : public EnvInstance {
 public:
  explicit RobustBoEnv(const ExperimentConfig& config)
      : config_(&config),
        game_(config.robust.own_file.empty()
                  ? RobustBoGame::synthetic(
                        config.robust.own_count, config.robust.adversary_count,
                        config.robust.dim,
                        derive_seed(config.base_seed, 0, kProfileStream),
                        config.robust.noise_std)
                  : RobustBoGame::from_files(config.robust.own_file,
                                             config.robust.adversary_file,
                                             config.robust.noise_std)) {}

  const RobustBoGame& game() const { return game_; }

  int num_agents() const override { return 2; }
  int num_actions(int agent) const override {
    return agent == 0 ? game_.own_count() : game_.adversary_count();
  }

  void begin_round(std::span<const int> actions) override {
    m_ = actions[0];
    u_ = actions[1];
  }

  double true_reward(int agent) const override {
    const double f = game_.reward(m_, u_);
    return agent == 0 ? f : 1.0 - f;
  }

  std::vector<double> counterfactuals(int agent) const override {
    const int k = num_actions(agent);
    std::vector<double> cf(k);
    for (int a = 0; a < k; ++a) {
      cf[a] = agent == 0 ? game_.reward(a, u_) : 1.0 - game_.reward(m_, a);
    }
    return cf;
  }

  std::vector<double> encode_outcome(int agent) const override {
    if (agent != 0) throw ConfigError("adversary has no GP encoding");
    return game_.encode(m_, u_);
  }

  std::vector<std::vector<double>> encode_candidates(int agent) const override {
    if (agent != 0) throw ConfigError("adversary has no GP encoding");
    std::vector<std::vector<double>> c;
    c.reserve(game_.own_count());
    for (int a = 0; a < game_.own_count(); ++a) {
      c.push_back(game_.encode(a, u_));
    }
    return c;
  }

  double noise_std(int agent) const override {
    return agent == 0 ? game_.noise_std() : 0.0;
  }

  KernelSpec default_kernel(int agent) const override {
    if (agent != 0) throw ConfigError("adversary has no GP kernel");
    // Linear on the feature block, near-diagonal on the adversary index.
    std::vector<int> feat(game_.dim());
    std::iota(feat.begin(), feat.end(), 0);
    return KernelSpec::product(
        {{KernelSpec::linear(1.0), std::move(feat)},
         {KernelSpec::se(0.01), {game_.dim()}}});
  }

  std::vector<std::vector<double>> selection_grid(int agent) const override {
    if (agent != 0) throw ConfigError("adversary has no selection grid");
    return game_.encode_grid();
  }

  void add_meta(EpisodeLog& log) const override {
    log.set_meta("env", "robust-bo");
    log.set_meta("own_count", std::to_string(game_.own_count()));
    log.set_meta("adversary_count", std::to_string(game_.adversary_count()));
    log.set_meta("rescale_min", format_double(game_.rescale_min()));
    log.set_meta("rescale_max", format_double(game_.rescale_max()));
  }

  std::string variant_of(int agent) const override {
    return agent == 0 ? config_->players.at(0).variant
                      : config_->robust.adversary.variant;
  }

 private:
  const ExperimentConfig* config_;
  RobustBoGame game_;
  int m_ = 0;
  int u_ = 0;
};

LearnerSetup setup_for(const ExperimentConfig& config, const EnvInstance& env,
                       int agent) {
  if (config.env_type == "matrix") return config.players.at(agent);
  if (config.env_type == "robust-bo") {
    return agent == 0 ? config.players.at(0) : config.robust.adversary;
  }
  if (env.variant_of(agent) == "fixed") {
    LearnerSetup fixed;
    fixed.variant = "fixed";
    fixed.fixed_action = 0;  // free-flow shortest route
    return fixed;
  }
  return config.routing_learner;
}

std::unique_ptr<Learner> build_learner(const ExperimentConfig& config,
                                       const EnvInstance& env,
                                       const LearnerSetup& setup, int agent,
                                       int repeat) {
  const int k = env.num_actions(agent);
  const int horizon = config.horizon;
  const std::uint64_t seed =
      derive_seed(config.base_seed, repeat, kLearnerStream + agent);
  const auto default_eta = [&]() {
    return setup.eta ? *setup.eta : (k >= 2 ? eta_schedule(k, horizon) : 1.0);
  };
  const auto model_noise = [&]() {
    return setup.model_noise_std >= 0.0 ? setup.model_noise_std
                                        : env.noise_std(agent);
  };

  if (setup.variant == "uniform-random") {
    return std::make_unique<UniformRandomLearner>(k, seed);
  }
  if (setup.variant == "fixed") {
    return std::make_unique<FixedActionLearner>(k, setup.fixed_action);
  }
  if (setup.variant == "hedge") {
    return std::make_unique<HedgeLearner>(k, default_eta(), seed);
  }
  if (setup.variant == "exp3p") {
    Exp3pConfig c = Exp3pConfig::make_default(k, horizon, setup.exp3p_delta);
    if (setup.exp3p_gamma) c.gamma_mix = *setup.exp3p_gamma;
    if (setup.exp3p_eta) c.eta = *setup.exp3p_eta;
    if (setup.exp3p_bonus) c.bonus = *setup.exp3p_bonus;
    return std::make_unique<Exp3pLearner>(k, c, seed);
  }
  if (setup.variant == "gp-mw") {
    GpMwConfig c;
    c.kernel = (setup.kernel && config.env_type != "routing")
                   ? *setup.kernel
                   : env.default_kernel(agent);
    c.model_noise_std = model_noise();
    c.schedule = {setup.rkhs_bound, setup.delta};
    c.fixed_beta = setup.fixed_beta;
    c.eta = default_eta();
    return std::make_unique<GpMwLearner>(k, c, seed);
  }
  if (setup.variant == "gp-ucb" || setup.variant == "stableopt") {
    GpSelectConfig c;
    c.kernel = setup.kernel ? *setup.kernel : env.default_kernel(agent);
    c.model_noise_std = model_noise();
    c.schedule = {setup.rkhs_bound, setup.delta};
    c.fixed_beta = setup.fixed_beta;
    c.rule = setup.variant == "gp-ucb" ? SelectRule::kMaxMax
                                       : SelectRule::kMaxMin;
    auto grid = env.selection_grid(agent);
    const int adv = static_cast<int>(grid.size()) / k;
    return std::make_unique<GpSelectLearner>(k, adv, std::move(grid), c);
  }
  throw ConfigError("unknown learner variant: " + setup.variant);
}

}  // namespace

std::unique_ptr<EnvInstance> make_env_instance(const ExperimentConfig& config,
                                               int repeat) {
  if (config.env_type == "matrix") {
    return std::make_unique<MatrixEnv>(config, repeat);
  }
  if (config.env_type == "routing") {
    return std::make_unique<RoutingEnv>(config);
  }
  if (config.env_type == "robust-bo") {
    return std::make_unique<RobustBoEnv>(config);
  }
  throw ConfigError("unknown environment type: " + config.env_type);
}

EpisodeLog run_repeat(const ExperimentConfig& config, int repeat) {
  auto env = make_env_instance(config, repeat);
  const int n = env->num_agents();
  const int horizon = config.horizon;
  if (horizon < 1) throw ConfigError("horizon must be >= 1");

  std::vector<std::unique_ptr<Learner>> learners(n);
  std::vector<RegretLedger> ledgers;
  ledgers.reserve(n);
  for (int i = 0; i < n; ++i) {
    learners[i] = build_learner(config, *env, setup_for(config, *env, i), i,
                                repeat);
    ledgers.emplace_back(env->num_actions(i));
  }

  EpisodeLog log;
  log.set_meta("name", config.name);
  log.set_meta("repeat", std::to_string(repeat));
  log.set_meta("base_seed", std::to_string(config.base_seed));
  log.set_meta("horizon", std::to_string(horizon));
  env->add_meta(log);
  {
    std::ostringstream variants;
    for (int i = 0; i < n; ++i) {
      if (i) variants << ";";
      variants << i << ":" << env->variant_of(i);
    }
    log.set_meta("agent_variants", variants.str());
  }

  Rng noise_rng(derive_seed(config.base_seed, repeat, kNoiseStream));
  std::vector<std::optional<Observation>> obs(n);
  std::vector<int> actions(n);

  for (int t = 1; t <= horizon; ++t) {
    // Distinct agents advance independently; this loop is the per-round
    // parallel axis.
    std::string failure;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
      try {
        actions[i] = learners[i]->step(obs[i] ? &*obs[i] : nullptr);
      } catch (const std::exception& e) {
#pragma omp critical
        if (failure.empty()) {
          failure = "agent " + std::to_string(i) + ": " + e.what();
        }
      }
    }
    if (!failure.empty()) {
      throw ProtocolError("round " + std::to_string(t) + ": " + failure);
    }

    env->begin_round(actions);
    const bool congested = env->has_congestion();
    const double congestion = congested ? env->congestion() : 0.0;

    for (int i = 0; i < n; ++i) {
      auto cf = env->counterfactuals(i);
      ledgers[i].record(actions[i], cf);
      const double truth = cf[actions[i]];
      const double noisy = truth + env->noise_std(i) * noise_rng.normal();

      EpisodeLog::Row row;
      row.round = t;
      row.agent = i;
      row.action = actions[i];
      row.true_reward = truth;
      row.noisy_reward = noisy;
      row.regret = ledgers[i].cumulative_regret();
      row.has_congestion = congested;
      row.congestion = congestion;
      log.rows.push_back(row);

      const std::string variant = env->variant_of(i);
      if (variant == "hedge") {
        Observation o;
        o.full_rewards = std::move(cf);
        obs[i] = std::move(o);
      } else if (variant == "gp-mw") {
        Observation o;
        o.noisy_reward = noisy;
        o.played_point = env->encode_outcome(i);
        o.candidate_points = env->encode_candidates(i);
        obs[i] = std::move(o);
      } else if (variant == "exp3p") {
        Observation o;
        o.noisy_reward = clamp01(noisy);
        obs[i] = std::move(o);
      } else if (variant == "gp-ucb" || variant == "stableopt") {
        Observation o;
        o.noisy_reward = noisy;
        obs[i] = std::move(o);
      }
      // uniform-random / fixed learners receive no feedback.
    }

    if (config.strategy_cadence > 0 && t % config.strategy_cadence == 0) {
      for (int i = 0; i < n; ++i) {
        auto w = learners[i]->strategy();
        for (int a = 0; a < static_cast<int>(w.size()); ++a) {
          log.strategies.push_back({t, i, a, w[a]});
        }
      }
    }
  }
  return log;
}

std::vector<EpisodeLog> run_experiment(const ExperimentConfig& config) {
  std::vector<EpisodeLog> logs;
  logs.reserve(config.repeats);
  for (int r = 0; r < config.repeats; ++r) {
    logs.push_back(run_repeat(config, r));
  }
  return logs;
}

std::vector<double> regret_series(const RegretLedger& ledger) {
  return ledger.time_averaged_regret();
}

namespace {

std::map<int, std::string> parse_agent_variants(const EpisodeLog& log) {
  std::map<int, std::string> out;
  std::istringstream in(log.meta_value("agent_variants"));
  std::string item;
  while (std::getline(in, item, ';')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) continue;
    out[std::stoi(item.substr(0, colon))] = item.substr(colon + 1);
  }
  return out;
}

SeriesStats stats_across(const std::vector<std::vector<double>>& per_repeat) {
  SeriesStats s;
  if (per_repeat.empty()) return s;
  const std::size_t len = per_repeat.front().size();
  const double n = static_cast<double>(per_repeat.size());
  s.mean.assign(len, 0.0);
  s.sd.assign(len, 0.0);
  for (const auto& series : per_repeat) {
    for (std::size_t t = 0; t < len; ++t) s.mean[t] += series[t];
  }
  for (std::size_t t = 0; t < len; ++t) s.mean[t] /= n;
  for (const auto& series : per_repeat) {
    for (std::size_t t = 0; t < len; ++t) {
      const double d = series[t] - s.mean[t];
      s.sd[t] += d * d;
    }
  }
  for (std::size_t t = 0; t < len; ++t) s.sd[t] = std::sqrt(s.sd[t] / n);
  return s;
}

}  // namespace

Summary summarize(const std::vector<EpisodeLog>& logs) {
  if (logs.empty()) throw InputError("summarize: no logs");
  Summary summary;
  summary.repeats = static_cast<int>(logs.size());
  int horizon = 0;
  for (const auto& r : logs.front().rows) horizon = std::max(horizon, r.round);
  summary.horizon = horizon;

  // variant -> repeat -> per-round mean over that variant's agents of R(t)/t
  std::map<std::string, std::vector<std::vector<double>>> regret_series_map;
  std::vector<std::vector<double>> congestion_series;
  bool any_congestion = false;

  for (const auto& log : logs) {
    auto variants = parse_agent_variants(log);
    int h = 0;
    for (const auto& r : log.rows) h = std::max(h, r.round);
    if (h != horizon) throw InputError("summarize: logs have mixed horizons");

    std::map<std::string, std::vector<double>> sums;  // per round
    std::map<std::string, int> counts;
    std::vector<double> congestion(h, 0.0);
    std::vector<char> congestion_seen(h, 0);
    for (const auto& row : log.rows) {
      auto it = variants.find(row.agent);
      const std::string v = it == variants.end() ? "unknown" : it->second;
      auto& acc = sums[v];
      if (acc.empty()) acc.assign(h, 0.0);
      acc[row.round - 1] += row.regret / row.round;
      if (row.round == 1) counts[v] += 1;
      if (row.has_congestion && !congestion_seen[row.round - 1]) {
        congestion[row.round - 1] = row.congestion;
        congestion_seen[row.round - 1] = 1;
        any_congestion = true;
      }
    }
    for (auto& [v, acc] : sums) {
      const double c = counts[v];
      for (double& x : acc) x /= c;
      regret_series_map[v].push_back(std::move(acc));
    }
    if (any_congestion) congestion_series.push_back(std::move(congestion));
  }

  for (auto& [variant, series] : regret_series_map) {
    auto stats = stats_across(series);
    summary.final_regret_mean[variant] = stats.mean.back();
    summary.final_regret_sd[variant] = stats.sd.back();
    summary.regret[variant] = std::move(stats);
  }
  if (any_congestion) {
    auto stats = stats_across(congestion_series);
    summary.final_congestion_mean = stats.mean.back();
    summary.final_congestion_sd = stats.sd.back();
    std::vector<std::vector<double>> time_means;
    for (const auto& series : congestion_series) {
      double acc = 0.0;
      for (double v : series) acc += v;
      time_means.push_back({acc / series.size()});
    }
    auto tm = stats_across(time_means);
    summary.mean_congestion_mean = tm.mean[0];
    summary.mean_congestion_sd = tm.sd[0];
    summary.congestion = std::move(stats);
  }
  return summary;
}

void write_summary_files(const Summary& summary, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  auto write_series = [&](const std::string& name, const SeriesStats& s) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write series file in " + dir);
    out << "round,mean,sd\n";
    for (std::size_t t = 0; t < s.mean.size(); ++t) {
      out << (t + 1) << "," << format_double(s.mean[t]) << ","
          << format_double(s.sd[t]) << "\n";
    }
  };

  for (const auto& [variant, series] : summary.regret) {
    write_series("series_regret_" + variant + ".csv", series);
  }
  if (summary.congestion) {
    write_series("series_congestion.csv", *summary.congestion);
  }

  std::ofstream out(fs::path(dir) / "summary.json", std::ios::binary);
  if (!out) throw ConfigError("cannot write summary.json in " + dir);
  out << "{\n  \"horizon\": " << summary.horizon
      << ",\n  \"repeats\": " << summary.repeats
      << ",\n  \"final_time_averaged_regret\": {";
  bool first = true;
  for (const auto& [variant, mean] : summary.final_regret_mean) {
    if (!first) out << ",";
    first = false;
    out << "\n    \"" << variant << "\": {\"mean\": " << format_double(mean)
        << ", \"sd\": " << format_double(summary.final_regret_sd.at(variant))
        << "}";
  }
  out << "\n  }";
  if (summary.congestion) {
    out << ",\n  \"congestion\": {\"final_mean\": "
        << format_double(summary.final_congestion_mean)
        << ", \"final_sd\": " << format_double(summary.final_congestion_sd)
        << ", \"time_mean\": " << format_double(summary.mean_congestion_mean)
        << ", \"time_mean_sd\": " << format_double(summary.mean_congestion_sd)
        << "}";
  }
  out << "\n}\n";
}

KernelSpec fit_hyperparameters(const ExperimentConfig& config,
                               const FitSetup& fit, std::uint64_t seed) {
  auto env = make_env_instance(config, 0);
  const int n = env->num_agents();
  if (fit.agent < 0 || fit.agent >= n) {
    throw ConfigError("fit.agent out of range");
  }
  if (fit.sample_count < 2) throw ConfigError("fit.sample_count too small");

  // Sample random joint outcomes and record the target agent's view.
  Rng rng(derive_seed(seed, 0, kFitStream));
  std::vector<std::vector<double>> inputs;
  std::vector<double> targets;
  std::vector<int> actions(n);
  const double noise = env->noise_std(fit.agent);
  for (int s = 0; s < fit.sample_count; ++s) {
    for (int i = 0; i < n; ++i) {
      actions[i] = rng.uniform_index(env->num_actions(i));
    }
    env->begin_round(actions);
    inputs.push_back(env->encode_outcome(fit.agent));
    targets.push_back(env->true_reward(fit.agent) + noise * rng.normal());
  }

  // Enumerate candidate specs from the template.
  const KernelSpec base = env->default_kernel(fit.agent);
  std::vector<KernelSpec> candidates;
  if (base.family != KernelFamily::kProduct) {
    auto ls = fit.lengthscales.empty()
                  ? std::vector<double>{base.lengthscale}
                  : fit.lengthscales;
    for (double l : ls) {
      KernelSpec k = base;
      k.lengthscale = l;
      candidates.push_back(k);
    }
  } else {
    if (!fit.factors.empty() && fit.factors.size() != base.factors.size()) {
      throw ConfigError("fit.factors must match the kernel's factor count");
    }
    candidates.push_back(base);
    for (std::size_t f = 0; f < base.factors.size(); ++f) {
      const FitSetup::FactorCandidates* fc =
          f < fit.factors.size() ? &fit.factors[f] : nullptr;
      std::vector<double> ls =
          (fc && !fc->lengthscales.empty())
              ? fc->lengthscales
              : std::vector<double>{base.factors[f].spec.lengthscale};
      std::vector<int> degrees;
      if (base.factors[f].spec.family == KernelFamily::kPolynomial) {
        degrees = (fc && !fc->degrees.empty())
                      ? fc->degrees
                      : std::vector<int>{base.factors[f].spec.degree};
        for (int d : degrees) {
          if (d != 2 && d != 4 && d != 6) {
            throw ConfigError("fit: polynomial degrees restricted to {2,4,6}");
          }
        }
      } else {
        degrees = {0};
      }
      std::vector<KernelSpec> next;
      for (const auto& partial : candidates) {
        for (double l : ls) {
          for (int d : degrees) {
            KernelSpec k = partial;
            k.factors[f].spec.lengthscale = l;
            if (d > 0) k.factors[f].spec.degree = d;
            next.push_back(std::move(k));
          }
        }
      }
      candidates = std::move(next);
    }
  }

  double best_lml = -std::numeric_limits<double>::infinity();
  int best = -1;
  std::vector<double> lmls(candidates.size(),
                           -std::numeric_limits<double>::infinity());
  const auto nc = static_cast<std::int64_t>(candidates.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < nc; ++c) {
    try {
      GpPosterior gp(candidates[static_cast<std::size_t>(c)],
                     std::max(noise * noise, 1e-12));
      for (std::size_t s = 0; s < inputs.size(); ++s) {
        gp.append(inputs[s], targets[s]);
      }
      lmls[static_cast<std::size_t>(c)] = gp.log_marginal_likelihood();
    } catch (const NumericalError&) {
      // candidate skipped
    }
  }
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (lmls[c] > best_lml) {
      best_lml = lmls[c];
      best = static_cast<int>(c);
    }
  }
  if (best < 0) {
    throw NumericalError("fit_hyperparameters: every candidate failed");
  }
  return candidates[best];
}

}  // namespace gpmw
