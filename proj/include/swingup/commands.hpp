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

#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "swingup/checkpoint.hpp"
#include "swingup/config.hpp"
#include "swingup/lqr.hpp"
#include "swingup/roa.hpp"

namespace swingup {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2, kExitIo = 3 };

/// Maps the active exception to an exit code and prints its message.
int exit_code_for_current_exception(std::ostream& err);

/// Paths and switches that are per-invocation rather than per-experiment.
struct CommandOptions {
  std::string checkpoint;   // empty: <output_dir>/agent.ckpt
  std::string input;        // plot input
  std::string output;       // plot / simulate output (empty: default name)
  bool resume = false;      // train: continue from the checkpoint
  std::string controller = "hybrid";  // simulate: hybrid, lqr, policy, zero
  State x0{};               // simulate initial state
};

// Each command validates its inputs before writing anything and returns
// normally on success; failures are reported as ConfigError,
// NumericalError or IoError.
void cmd_design_lqr(const RunConfig& cfg, std::ostream& out);
void cmd_estimate_roa(const RunConfig& cfg, const CommandOptions& opt, std::ostream& out);
void cmd_train(const RunConfig& cfg, const CommandOptions& opt, std::ostream& out);
void cmd_evaluate(const RunConfig& cfg, const CommandOptions& opt, std::ostream& out);
void cmd_robustness(const RunConfig& cfg, const CommandOptions& opt, std::ostream& out);
void cmd_plot(const CommandOptions& opt, std::ostream& out);
void cmd_simulate(const RunConfig& cfg, const CommandOptions& opt, std::ostream& out);

// Pipeline pieces shared by the commands.
LqrDesign design_from_config(const RunConfig& cfg);
nlohmann::ordered_json design_to_json(const LqrDesign& d);
nlohmann::ordered_json roa_to_json(const RoaEstimate& r);
RoaEstimate roa_from_json(const nlohmann::json& j);
/// Reads <output_dir>/roa.json when it matches the design, else estimates
/// the RoA and writes that file.
RoaEstimate load_or_estimate_roa(const RunConfig& cfg, const LqrDesign& design, std::ostream& out);
/// Environment with the reward's RoA bonus wired to `roa`.
EnvConfig training_env_config(const RunConfig& cfg, const RoaEstimate& roa);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace swingup
