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

// swingup: command-line front end for the pendubot/acrobot swing-up pipeline.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swingup/commands.hpp"
#include "swingup/errors.hpp"

namespace {

swingup::State parse_state(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw swingup::ConfigError("--x0: '" + item + "' is not a number");
    }
  }
  if (v.size() != 4) throw swingup::ConfigError("--x0 needs four comma-separated values p1,p2,v1,v2");
  return {v[0], v[1], v[2], v[3]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pendubot/acrobot swing-up: LQR design, RoA estimation, SAC training and evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  swingup::CommandOptions opt;
  std::string x0_text;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config,-c", config_path, "JSON run configuration");
    sub->add_option("--set", overrides, "Override a config value, e.g. --set sac.steps=1000")->allow_extra_args(false);
  };
  auto add_checkpoint = [&](CLI::App* sub) {
    sub->add_option("--checkpoint", opt.checkpoint, "Checkpoint path (default <output_dir>/agent.ckpt)");
  };

  CLI::App* design = app.add_subcommand("design-lqr", "Linearize at the upright goal and solve the Riccati equation");
  add_config(design);
  CLI::App* roa = app.add_subcommand("estimate-roa", "Estimate the LQR region of attraction");
  add_config(roa);
  add_checkpoint(roa);
  CLI::App* train = app.add_subcommand("train", "Train the SAC swing-up policy");
  add_config(train);
  add_checkpoint(train);
  train->add_flag("--resume", opt.resume, "Continue from the checkpoint");
  CLI::App* evaluate = app.add_subcommand("evaluate", "Roll out the hybrid controller and score it");
  add_config(evaluate);
  add_checkpoint(evaluate);
  CLI::App* robust = app.add_subcommand("robustness", "Run the perturbation suite");
  add_config(robust);
  add_checkpoint(robust);
  CLI::App* plot = app.add_subcommand("plot", "Render a trajectory CSV or robustness summary as SVG");
  plot->add_option("--input,-i", opt.input, "Trajectory CSV or robustness_summary.csv")->required();
  plot->add_option("--output,-o", opt.output, "SVG path (default: input with .svg)");
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate one controller from a given state");
  add_config(simulate);
  add_checkpoint(simulate);
  simulate->add_option("--controller", opt.controller, "hybrid, lqr, policy or zero")->capture_default_str();
  simulate->add_option("--x0", x0_text, "Initial state p1,p2,v1,v2 (default hanging at rest)");
  simulate->add_option("--output,-o", opt.output, "CSV path (default <output_dir>/simulation.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? swingup::kExitOk : swingup::kExitConfig;
  }

  try {
    if (plot->parsed()) {
      swingup::cmd_plot(opt, std::cout);
      return swingup::kExitOk;
    }
    if (!x0_text.empty()) opt.x0 = parse_state(x0_text);
    const swingup::RunConfig cfg = swingup::load_config(config_path, overrides);
    if (design->parsed()) swingup::cmd_design_lqr(cfg, std::cout);
    else if (roa->parsed()) swingup::cmd_estimate_roa(cfg, opt, std::cout);
    else if (train->parsed()) swingup::cmd_train(cfg, opt, std::cout);
    else if (evaluate->parsed()) swingup::cmd_evaluate(cfg, opt, std::cout);
    else if (robust->parsed()) swingup::cmd_robustness(cfg, opt, std::cout);
    else if (simulate->parsed()) swingup::cmd_simulate(cfg, opt, std::cout);
  } catch (...) {
    return swingup::exit_code_for_current_exception(std::cerr);
  }
  return swingup::kExitOk;
}
