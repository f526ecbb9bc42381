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

#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "swingup/checkpoint.hpp"
#include "swingup/commands.hpp"
#include "swingup/config.hpp"
#include "swingup/errors.hpp"
#include "swingup/plot.hpp"

namespace fs = std::filesystem;

namespace swingup {
namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("swingup_test_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small, fast settings for end-to-end command runs.
std::vector<std::string> quick_overrides(const fs::path& out) {
  return {"seed=5",
          "output_dir=" + out.string(),
          "env.episode_len=100",
          "sac.hidden=[8,8]",
          "sac.batch_size=16",
          "sac.warmup_steps=200",
          "sac.buffer_capacity=5000",
          "sac.steps=1000",
          "sac.checkpoint_every=500",
          "roa.n_samples=20",
          "roa.bisection_iters=8",
          "eval.horizon_s=3",
          "eval.verify_samples=10",
          "eval.robustness.measurement_noise=[0,0.05]",
          "eval.robustness.torque_noise=[0,1]",
          "eval.robustness.torque_response=[0.5,1]",
          "eval.robustness.time_delay=[0,10]",
          "eval.robustness.model_inaccuracy=[0,0.3]"};
}

RunConfig quick_config(const fs::path& out, std::vector<std::string> extra = {}) {
  std::vector<std::string> ov = quick_overrides(out);
  ov.insert(ov.end(), extra.begin(), extra.end());
  return load_config(std::string(SWINGUP_CONFIG_DIR) + "/pendubot.json", ov);
}

// --- configuration -------------------------------------------------------

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"pendubot.json", "acrobot.json"}) {
    const RunConfig cfg = load_config(std::string(SWINGUP_CONFIG_DIR) + "/" + name, {});
    EXPECT_EQ(cfg.model.actuation, actuation_of(cfg.env.robot)) << name;
    EXPECT_EQ(cfg.env.tau_max, cfg.model.tau_max);
    EXPECT_EQ(cfg.eval.robustness.size(), 5u);
  }
  const RunConfig a = load_config(std::string(SWINGUP_CONFIG_DIR) + "/acrobot.json", {});
  EXPECT_EQ(a.env.robot, Robot::Acrobot);
  EXPECT_EQ(a.env.episode_len, 1000);
  EXPECT_EQ(a.env.reward.r_vel, 1e4);
}

TEST(Config, DefaultsWithoutFile) {
  const RunConfig cfg = load_config("", {});
  EXPECT_EQ(cfg.env.robot, Robot::Pendubot);
  EXPECT_EQ(cfg.train.steps, 200000u);
  EXPECT_EQ(cfg.train.sac.hidden, (std::vector<int>{256, 256}));
  EXPECT_EQ(cfg.eval.dt_control, 0.002);
}

TEST(Config, UnknownKeysAreRejectedByName) {
  for (const char* ov : {"env.bogus=1", "bogus=1", "sac.learning_rate=0.1", "eval.score_ref.speed=2",
                         "eval.robustness.wind=[0,1]"}) {
    try {
      load_config("", {ov});
      ADD_FAILURE() << ov << " accepted";
    } catch (const ConfigError& e) {
      const std::string key = std::string(ov).substr(0, std::string(ov).find('='));
      EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
    }
  }
}

TEST(Config, OverridesApply) {
  const RunConfig cfg = load_config("", {"sac.gamma=0.9", "lqr.r=[2.0]", "env.robot=acrobot",
                                         "eval.score_ref.energy=7", "output_dir=abc"});
  EXPECT_EQ(cfg.train.sac.gamma, 0.9);
  EXPECT_EQ(cfg.lqr.R(0, 0), 2.0);
  EXPECT_EQ(cfg.env.robot, Robot::Acrobot);
  EXPECT_EQ(cfg.model.actuation, Actuation::Acrobot);
  EXPECT_EQ(cfg.eval.score_ref.energy, 7.0);
  EXPECT_EQ(cfg.output_dir, "abc");
}

TEST(Config, IllTypedAndInvalidValues) {
  EXPECT_THROW(load_config("", {"sac.gamma=fast"}), ConfigError);
  EXPECT_THROW(load_config("", {"sac.gamma=1.5"}), ConfigError);
  EXPECT_THROW(load_config("", {"env.episode_len=2.5"}), ConfigError);
  EXPECT_THROW(load_config("", {"eval.robustness.torque_response=[0,1]"}), ConfigError);
  EXPECT_THROW(load_config("", {"noequals"}), ConfigError);
  EXPECT_THROW(load_config("", {"model.actuation=\"acrobot\""}), ConfigError);
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_THROW(load_config("/nonexistent/run.json", {}), IoError);
}

TEST(Config, JsonRoundTrip) {
  const RunConfig cfg = load_config(std::string(SWINGUP_CONFIG_DIR) + "/acrobot.json", {"seed=9"});
  const nlohmann::json doc = config_to_json(cfg);
  const RunConfig back = parse_config(doc);
  EXPECT_EQ(nlohmann::json(config_to_json(back)), doc);
}

// --- checkpoints ---------------------------------------------------------

Checkpoint sample_checkpoint(bool with_session) {
  SacConfig sc;
  sc.hidden = {6, 5};
  sc.seed = 3;
  sc.buffer_capacity = 50;
  Checkpoint c{SacAgent(4, 1, sc), RoaEstimate{}, std::nullopt};
  c.roa->rho = 0.7;
  if (with_session) {
    EnvConfig ec = EnvConfig::defaults(Robot::Pendubot);
    ec.episode_len = 30;
    SwingupEnv env(ec, ModelParams::defaults());
    SacConfig run_cfg = sc;
    run_cfg.warmup_steps = 10;
    run_cfg.batch_size = 8;
    c.agent = SacAgent(4, 1, run_cfg);
    TrainingSession session(env, c.agent);
    session.run(70);
    c.session = snapshot_session(session, env);
  }
  return c;
}

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
  for (bool with_session : {false, true}) {
    const Checkpoint c = sample_checkpoint(with_session);
    std::ostringstream a;
    write_checkpoint(a, c);
    std::istringstream in(a.str());
    const Checkpoint back = read_checkpoint(in);
    EXPECT_EQ(back.agent, c.agent);
    EXPECT_EQ(back.session.has_value(), with_session);
    std::ostringstream b;
    write_checkpoint(b, back);
    EXPECT_EQ(a.str(), b.str());
  }
}

TEST(Checkpoint, FileRoundTrip) {
  const fs::path dir = scratch("ckpt");
  const Checkpoint c = sample_checkpoint(true);
  save_checkpoint((dir / "a.ckpt").string(), c);
  save_checkpoint((dir / "b.ckpt").string(), load_checkpoint((dir / "a.ckpt").string()));
  EXPECT_EQ(slurp(dir / "a.ckpt"), slurp(dir / "b.ckpt"));
  EXPECT_FALSE(fs::exists(dir / "a.ckpt.tmp"));
}

TEST(Checkpoint, RejectsCorruptFiles) {
  std::ostringstream good;
  write_checkpoint(good, sample_checkpoint(false));
  const std::string bytes = good.str();

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::istringstream m(bad_magic);
  EXPECT_THROW(read_checkpoint(m), IoError);

  std::string bad_version = bytes;
  bad_version[8] = 99;
  std::istringstream v(bad_version);
  EXPECT_THROW(read_checkpoint(v), IoError);

  std::istringstream t(bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(read_checkpoint(t), IoError);

  EXPECT_THROW(load_checkpoint("/nonexistent/agent.ckpt"), IoError);
}

// --- plots ---------------------------------------------------------------

Trajectory small_trajectory() {
  Trajectory tr;
  tr.dt = 0.01;
  for (int i = 0; i < 300; ++i) {
    const double t = 0.01 * i;
    tr.push(t, State{std::sin(t), std::cos(2 * t), t, -t}, Torque(std::sin(5 * t), 0.0),
            Torque(std::sin(5 * t), 0.0), i < 150 ? ControllerTag::Sac : ControllerTag::Lqr);
  }
  return tr;
}

void expect_well_formed_svg(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  ASSERT_NO_THROW(pt::read_xml(in, tree)) << text.substr(0, 200);
  EXPECT_EQ(tree.count("svg"), 1u);
}

TEST(Plot, TimeseriesIsWellFormedAndDeterministic) {
  std::ostringstream a, b;
  write_timeseries_svg(a, small_trajectory(), "run <1> & more");
  write_timeseries_svg(b, small_trajectory(), "run <1> & more");
  EXPECT_EQ(a.str(), b.str());
  expect_well_formed_svg(a.str());
}

TEST(Plot, BarChartIsWellFormed) {
  std::istringstream csv("kind,score\nmeasurement_noise,1\ntorque_noise,0.5\noverall,0.75\n");
  const auto bars = read_score_table(csv);
  ASSERT_EQ(bars.size(), 3u);
  EXPECT_EQ(bars[1].second, 0.5);
  std::ostringstream os;
  write_bar_chart_svg(os, bars, "robustness");
  expect_well_formed_svg(os.str());
}

TEST(Plot, EmptyTrajectoryIsAnError) {
  std::ostringstream os;
  EXPECT_THROW(write_timeseries_svg(os, Trajectory{}, "empty"), ConfigError);
}

// --- commands ------------------------------------------------------------

void run_pipeline(const fs::path& out) {
  const RunConfig cfg = quick_config(out);
  std::ostringstream log;
  CommandOptions opt;
  cmd_design_lqr(cfg, log);
  cmd_estimate_roa(cfg, opt, log);
  cmd_train(cfg, opt, log);
  cmd_evaluate(cfg, opt, log);
  cmd_robustness(cfg, opt, log);
  opt.input = (out / "trajectory.csv").string();
  cmd_plot(opt, log);
  opt.input = (out / "robustness_summary.csv").string();
  cmd_plot(opt, log);
  CommandOptions sim;
  sim.controller = "lqr";
  sim.x0 = State{M_PI - 0.1, 0.1, 0.0, 0.0};
  cmd_simulate(cfg, sim, log);
}

class Pipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    a_ = new fs::path(scratch("pipe_a"));
    b_ = new fs::path(scratch("pipe_b"));
    run_pipeline(*a_);
    run_pipeline(*b_);
  }
  static fs::path* a_;
  static fs::path* b_;
};
fs::path* Pipeline::a_ = nullptr;
fs::path* Pipeline::b_ = nullptr;

TEST_F(Pipeline, WritesExpectedFiles) {
  for (const char* f : {"lqr.json", "roa.json", "agent.ckpt", "train_log.csv", "trajectory.csv",
                        "metrics.json", "robustness.json", "robustness_levels.csv",
                        "robustness_summary.csv", "trajectory.svg", "robustness_summary.svg",
                        "simulation.csv"})
    EXPECT_TRUE(fs::exists(*a_ / f)) << f;
}

TEST_F(Pipeline, ByteIdenticalAcrossRuns) {
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(*a_)) {
    const fs::path other = *b_ / entry.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
    ++compared;
  }
  EXPECT_GE(compared, 12u);
}

TEST_F(Pipeline, MetricsMatchReparsedTrajectory) {
  const RunConfig cfg = quick_config(*a_);
  const Checkpoint ckpt = load_checkpoint(cfg.checkpoint_path());
  std::ifstream csv(*a_ / "trajectory.csv");
  const Trajectory tr = read_trajectory_csv(csv);
  EXPECT_EQ(tr.size(), 1500u);
  const MetricsReport m = compute_metrics(tr, cfg.criteria(*ckpt.roa), cfg.eval.score_ref);
  const nlohmann::json j = nlohmann::json::parse(slurp(*a_ / "metrics.json"));
  EXPECT_EQ(j.at("success").get<bool>(), m.success);
  EXPECT_EQ(j.at("swingup_time").get<double>(), m.swingup_time);
  EXPECT_EQ(j.at("energy").get<double>(), m.energy);
  EXPECT_EQ(j.at("max_torque").get<double>(), m.max_torque);
  EXPECT_EQ(j.at("integrated_torque").get<double>(), m.integrated_torque);
  EXPECT_EQ(j.at("torque_cost").get<double>(), m.torque_cost);
  EXPECT_EQ(j.at("torque_smoothness").get<double>(), m.torque_smoothness);
  EXPECT_EQ(j.at("velocity_cost").get<double>(), m.velocity_cost);
  EXPECT_EQ(j.at("score").get<double>(), m.score);
}

TEST_F(Pipeline, TrainLogRowsMatchEpisodes) {
  const std::string text = slurp(*a_ / "train_log.csv");
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,episode,return,ep_len,q_loss,pi_loss");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  // 1000 steps of 100-step episodes.
  EXPECT_EQ(rows, 10);
  const Checkpoint ckpt = load_checkpoint((*a_ / "agent.ckpt").string());
  ASSERT_TRUE(ckpt.session.has_value());
  EXPECT_EQ(ckpt.session->progress.total_steps, 1000u);
  EXPECT_EQ(ckpt.session->progress.episodes, 10u);
}

TEST_F(Pipeline, RobustnessSummaryConsistent) {
  const nlohmann::json j = nlohmann::json::parse(slurp(*a_ / "robustness.json"));
  double sum = 0.0;
  for (PerturbationKind k : kAllPerturbationKinds) sum += j.at(to_string(k)).get<double>();
  EXPECT_NEAR(j.at("overall").get<double>(), sum / 5.0, 1e-12);
}

TEST(Train, ResumeEqualsSingleRun) {
  const fs::path one = scratch("resume_single");
  const fs::path two = scratch("resume_split");
  std::ostringstream log;
  cmd_train(quick_config(one, {"sac.steps=2000"}), {}, log);
  cmd_train(quick_config(two, {"sac.steps=1000"}), {}, log);
  CommandOptions resume;
  resume.resume = true;
  cmd_train(quick_config(two, {"sac.steps=2000"}), resume, log);
  EXPECT_EQ(slurp(one / "agent.ckpt"), slurp(two / "agent.ckpt"));
  EXPECT_EQ(slurp(one / "train_log.csv"), slurp(two / "train_log.csv"));
}

TEST(Train, ResumeRejectsChangedSettings) {
  const fs::path dir = scratch("resume_changed");
  std::ostringstream log;
  cmd_train(quick_config(dir, {"sac.steps=300", "sac.checkpoint_every=0"}), {}, log);
  CommandOptions resume;
  resume.resume = true;
  EXPECT_THROW(cmd_train(quick_config(dir, {"sac.steps=600", "sac.gamma=0.5"}), resume, log), ConfigError);
  EXPECT_THROW(cmd_train(quick_config(scratch("resume_missing")), resume, log), IoError);
}

TEST(Train, ZeroStepsWritesNothing) {
  const fs::path dir = scratch("zero");
  std::ostringstream log;
  cmd_train(quick_config(dir, {"sac.steps=0"}), {}, log);
  EXPECT_FALSE(fs::exists(dir / "agent.ckpt"));
}

TEST(Commands, EvaluateWithoutCheckpointIsIoError) {
  std::ostringstream log;
  EXPECT_THROW(cmd_evaluate(quick_config(scratch("nockpt")), {}, log), IoError);
}

TEST(Commands, PlotRejectsUnknownInput) {
  const fs::path dir = scratch("plot_bad");
  std::ofstream(dir / "x.csv") << "a,b\n1,2\n";
  CommandOptions opt;
  opt.input = (dir / "x.csv").string();
  std::ostringstream log;
  EXPECT_THROW(cmd_plot(opt, log), ConfigError);
  std::ofstream(dir / "empty.csv") << kTrajectoryHeader << "\n";
  opt.input = (dir / "empty.csv").string();
  EXPECT_THROW(cmd_plot(opt, log), ConfigError);
}

// --- the binary ----------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SWINGUP_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit");
  const std::string base = "--config " + std::string(SWINGUP_CONFIG_DIR) + "/pendubot.json --set output_dir=" + dir.string();
  EXPECT_EQ(run_cli("design-lqr " + base), 0);
  EXPECT_TRUE(fs::exists(dir / "lqr.json"));
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("fly"), 1);
  EXPECT_EQ(run_cli("design-lqr " + base + " --set env.bogus=1"), 1);
  EXPECT_EQ(run_cli("design-lqr --config /nonexistent/cfg.json"), 3);
  EXPECT_EQ(run_cli("evaluate " + base + " --checkpoint " + (dir / "missing.ckpt").string()), 3);
  EXPECT_EQ(run_cli("design-lqr " + base + " --set lqr.max_iterations=1 --set lqr.tolerance=1e-300"), 2);
  EXPECT_EQ(run_cli("simulate " + base + " --controller zero --x0 1,2,3"), 1);
  EXPECT_EQ(run_cli("simulate " + base + " --controller zero --x0 0.1,0,0,0"), 0);
  EXPECT_TRUE(fs::exists(dir / "simulation.csv"));
}

}  // namespace
}  // namespace swingup
