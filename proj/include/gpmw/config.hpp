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

#ifndef GPMW_CONFIG_HPP_
#define GPMW_CONFIG_HPP_

#include <optional>
#include <string>

#include "gpmw/harness.hpp"
#include "json.hpp"

namespace gpmw {

struct LoadedConfig {
  ExperimentConfig experiment;
  std::optional<FitSetup> fit;
};

// Parses and validates a JSON experiment config. Relative file paths are
// resolved against the config file's directory. Validation failures raise
// ConfigError naming the offending section.
LoadedConfig load_config(const std::string& path);
LoadedConfig config_from_json(const nlohmann::json& j,
                              const std::string& base_dir);

KernelSpec kernel_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json kernel_to_json(const KernelSpec& spec);

}  // namespace gpmw

#endif  // GPMW_CONFIG_HPP_
