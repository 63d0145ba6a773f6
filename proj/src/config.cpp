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

#include "gpmw/config.hpp"

#include <filesystem>
#include <fstream>

namespace gpmw {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

double get_number(const json& j, const std::string& key,
                  const std::string& where, double fallback,
                  bool required = false) {
  if (!j.contains(key)) {
    if (required) fail(where + "." + key, "missing required value");
    return fallback;
  }
  if (!j[key].is_number()) fail(where + "." + key, "expected a number");
  return j[key].get<double>();
}

int get_int(const json& j, const std::string& key, const std::string& where,
            int fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required) fail(where + "." + key, "missing required value");
    return fallback;
  }
  if (!j[key].is_number_integer()) fail(where + "." + key, "expected an integer");
  return j[key].get<int>();
}

std::string get_string(const json& j, const std::string& key,
                       const std::string& where, const std::string& fallback,
                       bool required = false) {
  if (!j.contains(key)) {
    if (required) fail(where + "." + key, "missing required value");
    return fallback;
  }
  if (!j[key].is_string()) fail(where + "." + key, "expected a string");
  return j[key].get<std::string>();
}

std::string resolve_path(const std::string& raw, const std::string& base_dir) {
  namespace fs = std::filesystem;
  if (raw.empty()) return raw;
  fs::path p(raw);
  if (p.is_absolute()) return raw;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

KernelSpec kernel_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected a kernel object");
  const std::string family = get_string(j, "family", where, "", true);
  if (family == "se" || family == "squared-exponential") {
    return KernelSpec::se(get_number(j, "lengthscale", where, 1.0, true));
  }
  if (family == "matern") {
    return KernelSpec::matern(get_number(j, "nu", where, 2.5),
                              get_number(j, "lengthscale", where, 1.0, true));
  }
  if (family == "polynomial") {
    return KernelSpec::polynomial(get_int(j, "degree", where, 1, true),
                                  get_number(j, "offset", where, 0.0),
                                  get_number(j, "lengthscale", where, 1.0));
  }
  if (family == "linear") {
    return KernelSpec::linear(get_number(j, "lengthscale", where, 1.0));
  }
  if (family == "product") {
    if (!j.contains("factors") || !j["factors"].is_array() ||
        j["factors"].empty()) {
      fail(where + ".factors", "product kernel needs a factor array");
    }
    std::vector<KernelFactor> factors;
    int idx = 0;
    for (const auto& fj : j["factors"]) {
      const std::string fwhere =
          where + ".factors[" + std::to_string(idx++) + "]";
      KernelFactor f;
      f.spec = kernel_from_json(fj.contains("kernel") ? fj["kernel"] : fj,
                                fwhere);
      if (fj.contains("coords")) {
        for (const auto& c : fj["coords"]) f.coords.push_back(c.get<int>());
      } else if (fj.contains("range")) {
        const auto& r = fj["range"];
        if (!r.is_array() || r.size() != 2) {
          fail(fwhere + ".range", "expected [begin, end)");
        }
        for (int c = r[0].get<int>(); c < r[1].get<int>(); ++c) {
          f.coords.push_back(c);
        }
      }
      // Missing selectors mean "assigned by the environment" (routing
      // templates); use a placeholder so validation passes.
      if (f.coords.empty()) f.coords = {0};
      factors.push_back(std::move(f));
    }
    return KernelSpec::product(std::move(factors));
  }
  fail(where + ".family", "unknown kernel family '" + family + "'");
}

json kernel_to_json(const KernelSpec& spec) {
  json j;
  switch (spec.family) {
    case KernelFamily::kSquaredExponential:
      j["family"] = "se";
      j["lengthscale"] = spec.lengthscale;
      break;
    case KernelFamily::kMatern:
      j["family"] = "matern";
      j["nu"] = spec.smoothness;
      j["lengthscale"] = spec.lengthscale;
      break;
    case KernelFamily::kPolynomial:
      j["family"] = "polynomial";
      j["degree"] = spec.degree;
      j["offset"] = spec.offset;
      j["lengthscale"] = spec.lengthscale;
      break;
    case KernelFamily::kLinear:
      j["family"] = "linear";
      j["lengthscale"] = spec.lengthscale;
      break;
    case KernelFamily::kProduct: {
      j["family"] = "product";
      json factors = json::array();
      for (const auto& f : spec.factors) {
        json fj;
        fj["kernel"] = kernel_to_json(f.spec);
        fj["coords"] = f.coords;
        factors.push_back(std::move(fj));
      }
      j["factors"] = std::move(factors);
      break;
    }
  }
  return j;
}

namespace {

LearnerSetup learner_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected a learner object");
  LearnerSetup s;
  s.variant = get_string(j, "variant", where, "", true);
  const bool known =
      s.variant == "gp-mw" || s.variant == "hedge" || s.variant == "exp3p" ||
      s.variant == "gp-ucb" || s.variant == "stableopt" ||
      s.variant == "uniform-random" || s.variant == "fixed";
  if (!known) fail(where + ".variant", "unknown variant '" + s.variant + "'");
  if (j.contains("kernel")) {
    s.kernel = kernel_from_json(j["kernel"], where + ".kernel");
  }
  s.rkhs_bound = get_number(j, "rkhs_bound", where, s.rkhs_bound);
  s.delta = get_number(j, "delta", where, s.delta);
  if (!(s.delta > 0.0 && s.delta < 1.0)) {
    fail(where + ".delta", "must lie in (0, 1)");
  }
  s.model_noise_std = get_number(j, "model_noise_std", where, -1.0);
  if (j.contains("fixed_beta")) {
    s.fixed_beta = get_number(j, "fixed_beta", where, 0.0);
  }
  if (j.contains("eta")) s.eta = get_number(j, "eta", where, 0.0);
  if (j.contains("exp3p_gamma")) {
    s.exp3p_gamma = get_number(j, "exp3p_gamma", where, 0.0);
  }
  if (j.contains("exp3p_eta")) {
    s.exp3p_eta = get_number(j, "exp3p_eta", where, 0.0);
  }
  if (j.contains("exp3p_bonus")) {
    s.exp3p_bonus = get_number(j, "exp3p_bonus", where, 0.0);
  }
  s.exp3p_delta = get_number(j, "exp3p_delta", where, s.exp3p_delta);
  s.fixed_action = get_int(j, "fixed_action", where, 0);
  return s;
}

FitSetup fit_from_json(const json& j, const std::string& where) {
  FitSetup fit;
  fit.agent = get_int(j, "agent", where, 0);
  fit.sample_count = get_int(j, "sample_count", where, 200);
  if (j.contains("lengthscales")) {
    for (const auto& v : j["lengthscales"]) {
      fit.lengthscales.push_back(v.get<double>());
    }
  }
  if (j.contains("factors")) {
    for (const auto& fj : j["factors"]) {
      FitSetup::FactorCandidates fc;
      if (fj.contains("lengthscales")) {
        for (const auto& v : fj["lengthscales"]) {
          fc.lengthscales.push_back(v.get<double>());
        }
      }
      if (fj.contains("degrees")) {
        for (const auto& v : fj["degrees"]) fc.degrees.push_back(v.get<int>());
      }
      fit.factors.push_back(std::move(fc));
    }
  }
  return fit;
}

void require_file(const std::string& path, const std::string& where) {
  if (!std::filesystem::exists(path)) {
    fail(where, "file does not exist: " + path);
  }
}

}  // namespace

LoadedConfig config_from_json(const json& j, const std::string& base_dir) {
  LoadedConfig loaded;
  ExperimentConfig& c = loaded.experiment;
  c.name = get_string(j, "name", "config", "experiment");
  c.horizon = get_int(j, "horizon", "config", 100, true);
  if (c.horizon < 1) fail("config.horizon", "must be >= 1");
  c.repeats = get_int(j, "repeats", "config", 1);
  if (c.repeats < 1) fail("config.repeats", "must be >= 1");
  if (j.contains("base_seed")) {
    c.base_seed = j["base_seed"].get<std::uint64_t>();
  }
  c.strategy_cadence = get_int(j, "strategy_snapshot_cadence", "config", 0);
  c.out_dir = get_string(j, "output_dir", "config", "out");

  if (!j.contains("environment") || !j["environment"].is_object()) {
    fail("config.environment", "missing environment section");
  }
  const json& env = j["environment"];
  c.env_type = get_string(env, "type", "environment", "", true);

  if (c.env_type == "matrix") {
    c.matrix.num_actions = get_int(env, "actions", "environment", 30, true);
    if (c.matrix.num_actions < 2) fail("environment.actions", "must be >= 2");
    c.matrix.noise_std = get_number(env, "noise_std", "environment", 1.0);
    if (env.contains("kernel")) {
      c.matrix.kernel = kernel_from_json(env["kernel"], "environment.kernel");
    }
    validate_kernel(c.matrix.kernel);
    if (!j.contains("players") || !j["players"].is_array() ||
        j["players"].size() != 2) {
      fail("config.players", "matrix games need exactly two players");
    }
    int idx = 0;
    for (const auto& pj : j["players"]) {
      c.players.push_back(
          learner_from_json(pj, "players[" + std::to_string(idx++) + "]"));
    }
  } else if (c.env_type == "routing") {
    c.routing.network_file = resolve_path(
        get_string(env, "network_file", "environment", "", true), base_dir);
    c.routing.trips_file = resolve_path(
        get_string(env, "trips_file", "environment", "", true), base_dir);
    require_file(c.routing.network_file, "environment.network_file");
    require_file(c.routing.trips_file, "environment.trips_file");
    c.routing.time_scale = get_number(env, "time_scale", "environment", 1.0);
    if (!(c.routing.time_scale > 0.0)) {
      fail("environment.time_scale", "must be positive");
    }
    c.routing.max_routes = get_int(env, "max_routes", "environment", 5);
    if (c.routing.max_routes < 1) fail("environment.max_routes", "must be >= 1");
    c.routing.learning_agents =
        get_int(env, "learning_agents", "environment", 0, true);
    c.routing.bound_samples = get_int(env, "bound_samples", "environment", 10000);
    if (c.routing.bound_samples < 1) {
      fail("environment.bound_samples", "must be >= 1");
    }
    if (env.contains("normalize_by_capacity")) {
      c.routing.normalize_by_capacity =
          env["normalize_by_capacity"].get<bool>();
    }
    if (!j.contains("learner")) {
      fail("config.learner", "routing configs need a learner section");
    }
    c.routing_learner = learner_from_json(j["learner"], "learner");
  } else if (c.env_type == "robust-bo") {
    c.robust.own_count = get_int(env, "own_count", "environment", 200);
    c.robust.adversary_count =
        get_int(env, "adversary_count", "environment", 50);
    c.robust.dim = get_int(env, "dim", "environment", 15);
    if (c.robust.own_count < 1 || c.robust.adversary_count < 1 ||
        c.robust.dim < 1) {
      fail("environment", "robust-bo counts must be positive");
    }
    c.robust.noise_std = get_number(env, "noise_std", "environment", 0.1);
    c.robust.own_file =
        resolve_path(get_string(env, "own_file", "environment", ""), base_dir);
    c.robust.adversary_file = resolve_path(
        get_string(env, "adversary_file", "environment", ""), base_dir);
    if (c.robust.own_file.empty() != c.robust.adversary_file.empty()) {
      fail("environment", "own_file and adversary_file must come together");
    }
    if (!c.robust.own_file.empty()) {
      require_file(c.robust.own_file, "environment.own_file");
      require_file(c.robust.adversary_file, "environment.adversary_file");
    }
    if (!env.contains("adversary")) {
      fail("environment.adversary", "robust-bo needs an adversary learner");
    }
    c.robust.adversary =
        learner_from_json(env["adversary"], "environment.adversary");
    if (!j.contains("players") || !j["players"].is_array() ||
        j["players"].size() != 1) {
      fail("config.players", "robust-bo configs take exactly one player");
    }
    c.players.push_back(learner_from_json(j["players"][0], "players[0]"));
  } else {
    fail("environment.type", "unknown type '" + c.env_type + "'");
  }

  if (j.contains("fit")) {
    loaded.fit = fit_from_json(j["fit"], "fit");
  }
  return loaded;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error in ") + path + ": " +
                      e.what());
  }
  const std::string base_dir =
      std::filesystem::path(path).parent_path().string();
  return config_from_json(j, base_dir.empty() ? "." : base_dir);
}

}  // namespace gpmw
