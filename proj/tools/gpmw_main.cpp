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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "gpmw/config.hpp"
#include "gpmw/harness.hpp"
#include "gpmw/routing.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;

namespace {

struct GlobalOpts {
  bool quiet = false;
  bool verbose = false;
};

void info(const GlobalOpts& g, const std::string& msg) {
  if (!g.quiet) std::cout << msg << "\n";
}

std::string pick_out_dir(const std::string& flag_value,
                         const std::string& config_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("GPMW_OUT_DIR"); env && *env) return env;
  return config_value;
}

int cmd_run(const GlobalOpts& g, const std::string& config_path,
            const std::string& out_flag, std::int64_t seed_override,
            int parallel) {
#ifdef _OPENMP
  if (parallel > 0) omp_set_num_threads(parallel);
#else
  (void)parallel;
#endif
  auto loaded = gpmw::load_config(config_path);
  auto& config = loaded.experiment;
  if (seed_override >= 0) {
    config.base_seed = static_cast<std::uint64_t>(seed_override);
  }
  const std::string out_dir = pick_out_dir(out_flag, config.out_dir);
  fs::create_directories(out_dir);

  info(g, "running '" + config.name + "' (" + config.env_type + ", T=" +
              std::to_string(config.horizon) + ", repeats=" +
              std::to_string(config.repeats) + ", seed=" +
              std::to_string(config.base_seed) + ")");
  auto logs = gpmw::run_experiment(config);
  for (std::size_t r = 0; r < logs.size(); ++r) {
    const auto path = fs::path(out_dir) / ("log_" + std::to_string(r) + ".csv");
    logs[r].save(path.string());
    if (g.verbose) info(g, "wrote " + path.string());
  }
  auto summary = gpmw::summarize(logs);
  gpmw::write_summary_files(summary, out_dir);
  for (const auto& [variant, mean] : summary.final_regret_mean) {
    info(g, "final time-averaged regret [" + variant +
                "]: " + gpmw::format_double(mean) + " +- " +
                gpmw::format_double(summary.final_regret_sd.at(variant)));
  }
  if (summary.congestion) {
    info(g, "congestion (time mean): " +
                gpmw::format_double(summary.mean_congestion_mean));
  }
  info(g, "outputs in " + out_dir);
  return 0;
}

int cmd_validate(const GlobalOpts& g, const std::string& config_path) {
  auto loaded = gpmw::load_config(config_path);
  const auto& config = loaded.experiment;
  if (config.env_type == "matrix") {
    info(g, "matrix config: K=" + std::to_string(config.matrix.num_actions) +
                ", T=" + std::to_string(config.horizon) + ", repeats=" +
                std::to_string(config.repeats));
  } else if (config.env_type == "routing") {
    auto net = gpmw::load_tntp(config.routing.network_file,
                               config.routing.trips_file,
                               config.routing.time_scale);
    gpmw::RoutingGame game(std::move(net), config.routing.max_routes);
    std::map<int, int> route_histogram;
    for (const auto& a : game.agents()) route_histogram[a.num_routes()] += 1;
    info(g, "routing config: " + std::to_string(game.num_agents()) +
                " agents, " +
                std::to_string(game.network().edges.size()) + " edges, " +
                std::to_string(config.routing.learning_agents) +
                " learning agents, T=" + std::to_string(config.horizon));
    for (const auto& [routes, count] : route_histogram) {
      info(g, "  agents with " + std::to_string(routes) +
                  " route(s): " + std::to_string(count));
    }
  } else if (config.env_type == "robust-bo") {
    auto env = gpmw::make_env_instance(config, 0);
    info(g, "robust-bo config: " + std::to_string(env->num_actions(0)) +
                " actions x " + std::to_string(env->num_actions(1)) +
                " adversary profiles, T=" + std::to_string(config.horizon));
  }
  info(g, "config OK");
  return 0;
}

int cmd_fit(const GlobalOpts& g, const std::string& config_path,
            const std::string& out_path, std::int64_t seed_override) {
  auto loaded = gpmw::load_config(config_path);
  if (!loaded.fit) {
    throw gpmw::ConfigError("config has no 'fit' section");
  }
  const std::uint64_t seed = seed_override >= 0
                                 ? static_cast<std::uint64_t>(seed_override)
                                 : loaded.experiment.base_seed;
  auto best =
      gpmw::fit_hyperparameters(loaded.experiment, *loaded.fit, seed);
  auto j = gpmw::kernel_to_json(best);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << j.dump(2) << "\n";
    info(g, "wrote " + out_path);
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_export(const GlobalOpts& g, const std::string& log_dir) {
  std::vector<std::string> files;
  if (!fs::is_directory(log_dir)) {
    throw gpmw::ConfigError("not a directory: " + log_dir);
  }
  for (const auto& entry : fs::directory_iterator(log_dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("log_", 0) == 0 && entry.path().extension() == ".csv") {
      files.push_back(entry.path().string());
    }
  }
  if (files.empty()) {
    throw gpmw::ConfigError("no log_*.csv files in " + log_dir);
  }
  std::sort(files.begin(), files.end());
  std::vector<gpmw::EpisodeLog> logs;
  for (const auto& f : files) logs.push_back(gpmw::EpisodeLog::load(f));
  auto summary = gpmw::summarize(logs);
  gpmw::write_summary_files(summary, log_dir);
  info(g, "regenerated summary for " + std::to_string(logs.size()) +
              " log(s) in " + log_dir);
  return 0;
}

int cmd_routes(const GlobalOpts&, const std::string& config_path) {
  auto loaded = gpmw::load_config(config_path);
  const auto& config = loaded.experiment;
  if (config.env_type != "routing") {
    throw gpmw::ConfigError("routes: config is not a routing experiment");
  }
  auto net = gpmw::load_tntp(config.routing.network_file,
                             config.routing.trips_file,
                             config.routing.time_scale);
  gpmw::RoutingGame game(std::move(net), config.routing.max_routes);
  std::cout << "agent,origin,dest,units,route,free_flow_cost,edges\n";
  for (const auto& a : game.agents()) {
    const auto& od = game.network().demands[a.agent];
    for (int r = 0; r < a.num_routes(); ++r) {
      std::cout << a.agent << "," << od.origin + 1 << "," << od.dest + 1 << ","
                << gpmw::format_double(a.units) << "," << r << ","
                << gpmw::format_double(a.free_flow_costs[r]) << ",";
      const auto& route = a.routes[r];
      for (std::size_t e = 0; e < route.size(); ++e) {
        if (e) std::cout << " ";
        std::cout << a.edge_subset[route[e]];
      }
      std::cout << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeated-game simulator: GP-driven multiplicative-weights "
               "learners, bandit baselines, and three environments"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_flag("--quiet", g.quiet, "suppress progress output");
  app.add_flag("--verbose", g.verbose, "extra progress output");

  std::string config_path, out_dir, log_dir;
  std::int64_t seed = -1;
  int parallel = 1;

  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--out", out_dir, "output directory (overrides config)");
  run->add_option("--seed", seed, "base seed override");
  run->add_option("--parallel", parallel, "worker thread count (default 1)");

  auto* validate = app.add_subcommand("validate", "validate a config without running");
  validate->add_option("--config", config_path, "config file")->required();

  auto* fit = app.add_subcommand("fit", "offline kernel hyperparameter fit");
  fit->add_option("--config", config_path, "config file with a fit section")
      ->required();
  fit->add_option("--out", out_dir, "write the fitted kernel JSON here");
  fit->add_option("--seed", seed, "sampling seed override");

  auto* exp = app.add_subcommand("export", "regenerate summary files from logs");
  exp->add_option("--log-dir", log_dir, "directory holding log_*.csv")
      ->required();

  auto* routes = app.add_subcommand("routes", "dump enumerated route sets");
  routes->add_option("--config", config_path, "routing config file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(g, config_path, out_dir, seed, parallel);
    if (validate->parsed()) return cmd_validate(g, config_path);
    if (fit->parsed()) return cmd_fit(g, config_path, out_dir, seed);
    if (exp->parsed()) return cmd_export(g, log_dir);
    if (routes->parsed()) return cmd_routes(g, config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
