// Copyright 2026 The swingup-bench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swingup/dynamics.hpp"
#include "swingup/env.hpp"
#include "swingup/eval.hpp"
#include "swingup/lqr.hpp"
#include "swingup/roa.hpp"
#include "swingup/sac.hpp"

namespace swingup {

struct TrainConfig {
  SacConfig sac;
  std::uint64_t steps = 200000;
  std::uint64_t checkpoint_every = 50000;  // 0 disables periodic checkpoints
};

struct EvalConfig {
  double horizon_s = 10.0;
  double dt_control = 0.002;
  double height_frac = 0.9;
  double t_hold = 2.0;
  ScoreReferences score_ref;
  std::vector<PerturbationSpec> robustness;  // one per kind
  int threads = 1;
  int verify_samples = 100;  // fresh RoA samples checked by estimate-roa
  double verify_eps = 1e-3;  // convergence radius for those samples
};

/// Fully validated run configuration.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  ModelParams model;
  EnvConfig env;
  TrainConfig train;
  LqrWeights lqr;
  CareOptions care;
  RoaConfig roa;
  EvalConfig eval;

  std::string checkpoint_path() const;
  std::string output_path(const std::string& name) const;
  SuccessCriteria criteria(const RoaEstimate& roa) const;
};

/// Default configuration for a robot, before any file or override.
nlohmann::json default_config_json(Robot robot);

/// Parses a configuration document. Missing keys take robot defaults;
/// unknown keys and ill-typed values raise ConfigError naming the key.
RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = ".");

/// Applies `section.key=value` to the raw document. The value is read as
/// JSON when it parses, otherwise as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Loads the file (empty path = defaults), applies overrides, and parses.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

nlohmann::ordered_json config_to_json(const RunConfig& cfg);

}  // namespace swingup
