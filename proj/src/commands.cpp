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

#include "swingup/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "swingup/errors.hpp"
#include "swingup/eval.hpp"
#include "swingup/hybrid.hpp"
#include "swingup/plot.hpp"

namespace swingup {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kDesignResidualLimit = 1e-8;
constexpr const char* kLogHeader = "step,episode,return,ep_len,q_loss,pi_loss";

template <class M>
ordered_json matrix_json(const M& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

ordered_json state_json(const State& x) { return ordered_json::array({x.p1, x.p2, x.v1, x.v2}); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void ensure_output_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.output_dir + "': " + ec.message());
}

std::string checkpoint_path(const RunConfig& cfg, const CommandOptions& opt) {
  return opt.checkpoint.empty() ? cfg.checkpoint_path() : opt.checkpoint;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string format_record(const EpisodeRecord& r) {
  std::ostringstream s;
  s << std::setprecision(17) << r.step << ',' << r.episode << ',' << r.ret << ',' << r.length << ','
    << r.q_loss << ',' << r.pi_loss << '\n';
  return s.str();
}

Checkpoint load_evaluable_checkpoint(const RunConfig& cfg, const CommandOptions& opt) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path(cfg, opt));
  if (!ckpt.roa) throw ConfigError("checkpoint carries no RoA estimate; run train first");
  if (ckpt.agent.action_dim() != cfg.model.num_inputs())
    throw ConfigError("checkpoint action size does not match the configured robot");
  return ckpt;
}

HybridController make_controller(const RunConfig& cfg, const Checkpoint& ckpt, const LqrDesign& design) {
  return HybridController(ckpt.agent.policy, design, *ckpt.roa, cfg.env.v_max, cfg.model.tau_max,
                          cfg.eval.dt_control);
}

}  // namespace

int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IoError& e) {
    err << "i/o failure: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::bad_alloc&) {
    err << "out of memory\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw IoError("failed writing '" + tmp + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
}

LqrDesign design_from_config(const RunConfig& cfg) {
  return design_lqr(cfg.model, cfg.lqr, cfg.care);
}

ordered_json design_to_json(const LqrDesign& d) {
  ordered_json j;
  j["actuation"] = to_string(d.actuation);
  j["goal"] = state_json(d.goal);
  j["K"] = matrix_json(d.K);
  j["S"] = matrix_json(d.S);
  j["A"] = matrix_json(d.A);
  j["B"] = matrix_json(d.B);
  ordered_json eig = ordered_json::array();
  const Eigen::VectorXcd ev = d.closed_loop_eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) eig.push_back({ev[i].real(), ev[i].imag()});
  j["closed_loop_eigenvalues"] = eig;
  j["care_residual"] = d.residual;
  j["iterations"] = d.iterations;
  return j;
}

ordered_json roa_to_json(const RoaEstimate& r) {
  ordered_json j;
  j["rho"] = r.rho;
  j["S"] = matrix_json(r.S);
  j["goal"] = state_json(r.goal);
  return j;
}

RoaEstimate roa_from_json(const json& j) {
  try {
    RoaEstimate r;
    r.rho = j.at("rho").get<double>();
    const json& s = j.at("S");
    if (s.size() != 4) throw ConfigError("RoA S must be 4x4");
    for (int i = 0; i < 4; ++i) {
      if (s[i].size() != 4) throw ConfigError("RoA S must be 4x4");
      for (int k = 0; k < 4; ++k) r.S(i, k) = s[i][k].get<double>();
    }
    const json& g = j.at("goal");
    if (g.size() != 4) throw ConfigError("RoA goal must have 4 entries");
    r.goal = {g[0].get<double>(), g[1].get<double>(), g[2].get<double>(), g[3].get<double>()};
    if (!(r.rho > 0.0)) throw ConfigError("RoA rho must be positive");
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed RoA file: ") + e.what());
  }
}

RoaEstimate load_or_estimate_roa(const RunConfig& cfg, const LqrDesign& design, std::ostream& out) {
  const std::string path = cfg.output_path("roa.json");
  if (fs::exists(path)) {
    json j;
    try {
      j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
      throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
    RoaEstimate r = roa_from_json(j);
    if (r.S == design.S && r.goal == design.goal) {
      out << "using RoA from " << path << " (rho = " << r.rho << ")\n";
      return r;
    }
    out << path << " belongs to a different LQR design; re-estimating\n";
  }
  RoaEstimate r = estimate_rho(design, cfg.model, cfg.roa);
  ensure_output_dir(cfg);
  write_file_atomic(path, dump(roa_to_json(r)));
  out << "estimated RoA rho = " << r.rho << '\n';
  return r;
}

EnvConfig training_env_config(const RunConfig& cfg, const RoaEstimate& roa) {
  EnvConfig e = cfg.env;
  e.reward.s_lqr = roa.S;
  e.reward.rho = roa.rho;
  e.reward.goal = roa.goal;
  return e;
}

void cmd_design_lqr(const RunConfig& cfg, std::ostream& out) {
  const LqrDesign d = design_from_config(cfg);
  const ordered_json j = design_to_json(d);
  ensure_output_dir(cfg);
  write_file_atomic(cfg.output_path("lqr.json"), dump(j));
  out << dump(j);
  if (!(d.residual < kDesignResidualLimit))
    throw NumericalError("CARE residual " + std::to_string(d.residual) + " exceeds 1e-8");
  const Eigen::VectorXcd ev = d.closed_loop_eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (!(ev[i].real() < 0.0)) throw NumericalError("closed loop is not Hurwitz");
}

void cmd_estimate_roa(const RunConfig& cfg, const CommandOptions& opt, std::ostream& out) {
  const LqrDesign d = design_from_config(cfg);
  const RoaEstimate r = estimate_rho(d, cfg.model, cfg.roa);
  const double rate = verify_convergence_rate(r, d, cfg.model, cfg.eval.verify_samples, 0.99,
                                              cfg.roa.horizon_s, cfg.eval.verify_eps,
                                              derive_seed(cfg.roa.seed, {99}));
  ordered_json j = roa_to_json(r);
  j["verification_samples"] = cfg.eval.verify_samples;
  j["verification_rate"] = rate;
  ensure_output_dir(cfg);
  write_file_atomic(cfg.output_path("roa.json"), dump(j));
  const std::string ckpt_path = checkpoint_path(cfg, opt);
  if (fs::exists(ckpt_path)) {
    Checkpoint ckpt = load_checkpoint(ckpt_path);
    ckpt.roa = r;
    save_checkpoint(ckpt_path, ckpt);
    out << "updated RoA in " << ckpt_path << '\n';
  }
  out << dump(j);
}

void cmd_train(const RunConfig& cfg, const CommandOptions& opt, std::ostream& out) {
  const std::string ckpt_path = checkpoint_path(cfg, opt);
  const std::string log_path = cfg.output_path("train_log.csv");
  const int k = cfg.model.num_inputs();

  std::optional<Checkpoint> resumed;
  if (opt.resume) {
    if (!fs::exists(ckpt_path)) throw IoError("no checkpoint to resume at '" + ckpt_path + "'");
    resumed = load_checkpoint(ckpt_path);
    if (!resumed->session) throw ConfigError("checkpoint has no training session to resume");
    if (!(resumed->agent.config == cfg.train.sac))
      throw ConfigError("sac settings differ from the checkpoint being resumed");
    if (!resumed->roa) throw ConfigError("checkpoint being resumed has no RoA estimate");
    if (resumed->session->progress.total_steps >= cfg.train.steps) {
      out << "checkpoint already at " << resumed->session->progress.total_steps << " steps; nothing to do\n";
      return;
    }
  } else if (cfg.train.steps == 0) {
    out << "sac.steps = 0; nothing to do\n";
    return;
  }

  const LqrDesign design = design_from_config(cfg);
  RoaEstimate roa;
  if (resumed) {
    roa = *resumed->roa;
    if (roa.S != design.S) throw ConfigError("checkpoint RoA belongs to a different LQR design");
  } else {
    roa = load_or_estimate_roa(cfg, design, out);
  }

  SwingupEnv env(training_env_config(cfg, roa), cfg.model);
  SacAgent agent = resumed ? resumed->agent : SacAgent(4, k, cfg.train.sac);
  TrainingSession session(env, agent);
  ensure_output_dir(cfg);

  std::string log_text = std::string(kLogHeader) + "\n";
  if (resumed) {
    restore_session(session, env, *resumed->session, k);
    // Drop rows past the checkpoint so an interrupted run resumes cleanly.
    if (fs::exists(log_path)) {
      std::istringstream in(read_file(log_path));
      std::string line;
      std::getline(in, line);
      if (line != kLogHeader) throw IoError("'" + log_path + "' is not a training log");
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (std::stoull(line.substr(0, line.find(','))) <= session.progress().total_steps) log_text += line + "\n";
      }
    }
  }
  write_file_atomic(log_path, log_text);

  std::ofstream log(log_path, std::ios::binary | std::ios::app);
  if (!log) throw IoError("cannot append to '" + log_path + "'");
  const std::uint64_t every = cfg.train.checkpoint_every;
  while (session.progress().total_steps < cfg.train.steps) {
    const std::uint64_t done = session.progress().total_steps;
    std::uint64_t chunk = cfg.train.steps - done;
    if (every > 0) chunk = std::min(chunk, every - done % every);
    const TrainingLog part = session.run(chunk);
    for (const EpisodeRecord& r : part.episodes) log << format_record(r);
    log.flush();
    if (!log) throw IoError("failed writing '" + log_path + "'");
    save_checkpoint(ckpt_path, {agent, roa, snapshot_session(session, env)});
    out << "step " << session.progress().total_steps << '/' << cfg.train.steps << ", episodes "
        << session.progress().episodes << '\n';
  }
}

void cmd_evaluate(const RunConfig& cfg, const CommandOptions& opt, std::ostream& out) {
  const Checkpoint ckpt = load_evaluable_checkpoint(cfg, opt);
  const LqrDesign design = design_from_config(cfg);
  const HybridController controller = make_controller(cfg, ckpt, design);
  const Trajectory traj = rollout(controller, cfg.model, State{}, cfg.eval.horizon_s);
  const MetricsReport m = compute_metrics(traj, cfg.criteria(*ckpt.roa), cfg.eval.score_ref);

  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  ordered_json j = metrics_to_json(m);
  if (traj.diverged) j["diagnostic"] = traj.diagnostic;
  ensure_output_dir(cfg);
  write_file_atomic(cfg.output_path("trajectory.csv"), csv.str());
  write_file_atomic(cfg.output_path("metrics.json"), dump(j));
  out << dump(j);
}

void cmd_robustness(const RunConfig& cfg, const CommandOptions& opt, std::ostream& out) {
  const Checkpoint ckpt = load_evaluable_checkpoint(cfg, opt);
  const LqrDesign design = design_from_config(cfg);
  const HybridController controller = make_controller(cfg, ckpt, design);
  RobustnessSetup setup;
  setup.x0 = State{};
  setup.horizon_s = cfg.eval.horizon_s;
  setup.dt = cfg.eval.dt_control;
  setup.criteria = cfg.criteria(*ckpt.roa);
  setup.refs = cfg.eval.score_ref;
  setup.threads = cfg.eval.threads;
  const RobustnessReport report =
      robustness_suite([&controller] { return ControlLaw(controller); }, cfg.model, cfg.eval.robustness, setup);

  std::ostringstream levels, summary;
  write_robustness_levels_csv(levels, report);
  write_robustness_summary_csv(summary, report);
  const ordered_json j = robustness_to_json(report);
  ensure_output_dir(cfg);
  write_file_atomic(cfg.output_path("robustness_levels.csv"), levels.str());
  write_file_atomic(cfg.output_path("robustness_summary.csv"), summary.str());
  write_file_atomic(cfg.output_path("robustness.json"), dump(j));
  out << dump(j);
}

void cmd_plot(const CommandOptions& opt, std::ostream& out) {
  if (opt.input.empty()) throw ConfigError("plot needs --input");
  const std::string text = read_file(opt.input);
  const std::string first = text.substr(0, text.find('\n'));
  std::ostringstream svg;
  const std::string title = fs::path(opt.input).filename().string();
  std::istringstream in(text);
  if (first == kTrajectoryHeader) {
    write_timeseries_svg(svg, read_trajectory_csv(in), title);
  } else if (first == "kind,score") {
    write_bar_chart_svg(svg, read_score_table(in), title);
  } else {
    throw ConfigError("'" + opt.input + "' is neither a trajectory CSV nor a robustness summary");
  }
  const std::string output = opt.output.empty() ? fs::path(opt.input).replace_extension(".svg").string() : opt.output;
  write_file_atomic(output, svg.str());
  out << "wrote " << output << '\n';
}

void cmd_simulate(const RunConfig& cfg, const CommandOptions& opt, std::ostream& out) {
  if (!opt.x0.finite()) throw ConfigError("initial state must be finite");
  const LqrDesign design = design_from_config(cfg);
  const double tau_max = cfg.model.tau_max;
  ControlLaw law;
  if (opt.controller == "zero") {
    law = [](const State&) { return Command{Torque::Zero(), ControllerTag::Sac}; };
  } else if (opt.controller == "lqr") {
    law = [design, tau_max](const State& x) { return Command{lqr_control(x, design, tau_max), ControllerTag::Lqr}; };
  } else if (opt.controller == "policy" || opt.controller == "hybrid") {
    const Checkpoint ckpt = load_evaluable_checkpoint(cfg, opt);
    if (opt.controller == "hybrid") {
      law = ControlLaw(make_controller(cfg, ckpt, design));
    } else {
      const double v_max = cfg.env.v_max;
      const Actuation act = cfg.model.actuation;
      law = [policy = ckpt.agent.policy, v_max, tau_max, act](const State& x) {
        return Command{scale_action(policy_mean(policy, normalize_state(x, v_max)), tau_max, act),
                       ControllerTag::Sac};
      };
    }
  } else {
    throw ConfigError("unknown controller '" + opt.controller + "' (expected hybrid, lqr, policy or zero)");
  }
  const Trajectory traj = rollout(law, cfg.model, opt.x0, cfg.eval.horizon_s, cfg.eval.dt_control);
  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  ensure_output_dir(cfg);
  const std::string path = opt.output.empty() ? cfg.output_path("simulation.csv") : opt.output;
  write_file_atomic(path, csv.str());
  const State& last = traj.x.back();
  out << "wrote " << traj.size() << " rows to " << path << "; final state " << std::setprecision(6) << last.p1
      << ' ' << last.p2 << ' ' << last.v1 << ' ' << last.v2 << (traj.diverged ? " (diverged)" : "") << '\n';
}

}  // namespace swingup
