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

#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

#include "swingup/errors.hpp"
#include "swingup/eval.hpp"
#include "test_util.hpp"

namespace swingup {
namespace {

Trajectory make_grid(std::size_t n, double dt) {
  Trajectory tr;
  tr.dt = dt;
  for (std::size_t i = 0; i < n; ++i)
    tr.push(static_cast<double>(i) * dt, State{}, Torque::Zero(), Torque::Zero(), ControllerTag::Sac);
  return tr;
}

SuccessCriteria pendubot_criteria(double rho = 1.0) {
  SuccessCriteria c;
  c.params = ModelParams::defaults(Actuation::Pendubot);
  c.roa.S = Mat4::Identity();
  c.roa.rho = rho;
  return c;
}

TEST(Metrics, ConstantTorqueAndVelocity) {
  Trajectory tr = make_grid(100, 0.01);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    tr.x[i] = State{0.0, 0.0, 2.0, 0.0};
    tr.applied[i] = tr.commanded[i] = Torque(1.0, 0.0);
  }
  const MetricsReport m = compute_metrics(tr, pendubot_criteria());
  EXPECT_EQ(m.integrated_torque, 1.0);
  EXPECT_EQ(m.energy, 2.0);
  EXPECT_EQ(m.torque_smoothness, 0.0);
  EXPECT_EQ(m.max_torque, 1.0);
  EXPECT_NEAR(m.torque_cost, 1.0, 1e-15);
  EXPECT_NEAR(m.velocity_cost, 4.0, 1e-15);
  EXPECT_FALSE(m.success);
  EXPECT_EQ(m.score, 0.0);
}

TEST(Metrics, AllZeroTrajectoryFails) {
  const MetricsReport m = compute_metrics(make_grid(500, 0.002), pendubot_criteria());
  EXPECT_FALSE(m.success);
  EXPECT_EQ(m.score, 0.0);
  EXPECT_EQ(m.energy, 0.0);
  EXPECT_EQ(m.velocity_cost, 0.0);
}

TEST(Metrics, SmoothnessOfAlternatingTorque) {
  Trajectory tr = make_grid(11, 0.1);
  for (std::size_t i = 0; i < tr.size(); ++i) tr.applied[i] = Torque(i % 2 == 0 ? 1.0 : -1.0, 0.0);
  EXPECT_NEAR(compute_metrics(tr, pendubot_criteria()).torque_smoothness, 2.0, 1e-15);
}

TEST(Metrics, HeldGoalScoresPerfectly) {
  Trajectory tr = make_grid(1500, 0.002);
  for (State& s : tr.x) s = upright_goal();
  const MetricsReport m = compute_metrics(tr, pendubot_criteria());
  EXPECT_TRUE(m.success);
  EXPECT_EQ(m.swingup_time, 0.0);
  EXPECT_EQ(m.score, 1.0);
}

TEST(Metrics, PiecewiseSwingupTime) {
  const double dt = 0.002;
  for (double t_star : {0.5, 1.237, 2.9}) {
    Trajectory tr = make_grid(2500, dt);
    for (std::size_t i = 0; i < tr.size(); ++i)
      if (tr.t[i] >= t_star) tr.x[i] = upright_goal();
    const MetricsReport m = compute_metrics(tr, pendubot_criteria());
    EXPECT_TRUE(m.success);
    EXPECT_NEAR(m.swingup_time, t_star, dt);
    EXPECT_GT(m.score, 0.0);
    EXPECT_LE(m.score, 1.0);
  }
}

TEST(Metrics, HoldMustLastToTheEnd) {
  // Goal reached but held only 1.5 s of the required 2 s.
  Trajectory tr = make_grid(2500, 0.002);
  for (std::size_t i = 1750; i < tr.size(); ++i) tr.x[i] = upright_goal();
  EXPECT_FALSE(compute_metrics(tr, pendubot_criteria()).success);
  // Height alone is not enough: upright but spinning fast leaves the RoA.
  Trajectory spin = make_grid(2500, 0.002);
  for (State& s : spin.x) s = State{M_PI, 0.0, 5.0, 0.0};
  EXPECT_FALSE(compute_metrics(spin, pendubot_criteria()).success);
}

TEST(Metrics, TimeReversedSuccessFails) {
  Trajectory tr = make_grid(2500, 0.002);
  for (std::size_t i = 0; i < tr.size(); ++i)
    if (tr.t[i] >= 1.0) tr.x[i] = upright_goal();
  ASSERT_TRUE(compute_metrics(tr, pendubot_criteria()).success);
  Trajectory rev = tr;
  std::reverse(rev.x.begin(), rev.x.end());
  std::reverse(rev.applied.begin(), rev.applied.end());
  EXPECT_FALSE(compute_metrics(rev, pendubot_criteria()).success);
}

TEST(Metrics, DivergedRolloutFails) {
  Trajectory tr = make_grid(1500, 0.002);
  for (State& s : tr.x) s = upright_goal();
  tr.diverged = true;
  EXPECT_FALSE(compute_metrics(tr, pendubot_criteria()).success);
}

TEST(Metrics, AdditiveOverConcatenation) {
  std::mt19937_64 g(21);
  std::normal_distribution<double> n(0.0, 2.0);
  Trajectory tr = make_grid(1000, 0.002);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    tr.x[i] = State{n(g), n(g), n(g), n(g)};
    tr.applied[i] = Torque(n(g), n(g));
  }
  auto slice = [&](std::size_t a, std::size_t b) {
    Trajectory s;
    s.dt = tr.dt;
    for (std::size_t i = a; i < b; ++i) s.push(tr.t[i], tr.x[i], tr.commanded[i], tr.applied[i], tr.tag[i]);
    return s;
  };
  const SuccessCriteria c = pendubot_criteria();
  const MetricsReport whole = compute_metrics(tr, c);
  const MetricsReport a = compute_metrics(slice(0, 377), c);
  const MetricsReport b = compute_metrics(slice(377, 1000), c);
  EXPECT_NEAR(whole.energy, a.energy + b.energy, 1e-12 * whole.energy);
  EXPECT_NEAR(whole.integrated_torque, a.integrated_torque + b.integrated_torque, 1e-12 * whole.integrated_torque);
  EXPECT_NEAR(whole.torque_cost, a.torque_cost + b.torque_cost, 1e-12 * whole.torque_cost);
  EXPECT_NEAR(whole.velocity_cost, a.velocity_cost + b.velocity_cost, 1e-12 * whole.velocity_cost);
  EXPECT_EQ(whole.max_torque, std::max(a.max_torque, b.max_torque));
}

TEST(Metrics, NonNegative) {
  std::mt19937_64 g(22);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    Trajectory tr = make_grid(200, 0.01);
    for (std::size_t i = 0; i < tr.size(); ++i) {
      tr.x[i] = State{n(g), n(g), n(g), n(g)};
      tr.applied[i] = Torque(n(g), n(g));
    }
    const MetricsReport m = compute_metrics(tr, pendubot_criteria());
    for (double v : {m.swingup_time, m.energy, m.max_torque, m.integrated_torque, m.torque_cost,
                     m.torque_smoothness, m.velocity_cost, m.score})
      EXPECT_GE(v, 0.0);
  }
}

TEST(Metrics, RejectsEmptyAndNonUniform) {
  EXPECT_THROW(compute_metrics(Trajectory{}, pendubot_criteria()), ConfigError);
  Trajectory tr = make_grid(10, 0.01);
  tr.t[5] += 0.003;
  EXPECT_THROW(compute_metrics(tr, pendubot_criteria()), ConfigError);
}

TEST(Metrics, JsonFieldOrder) {
  const auto j = metrics_to_json(MetricsReport{});
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"success", "swingup_time", "energy", "max_torque",
                                            "integrated_torque", "torque_cost",
                                            "torque_smoothness", "velocity_cost", "score"}));
}

// Closed-loop fixture: LQR near the goal with a policy-free fallback.
struct Loop {
  ModelParams params = ModelParams::defaults(Actuation::Pendubot);
  LqrDesign design = design_lqr(params, LqrWeights::pendubot_defaults());
  ControlLaw law() const {
    return [d = design](const State& x) { return Command{lqr_control(x, d, 5.0), ControllerTag::Lqr}; };
  }
  State x0{M_PI - 0.05, 0.04, 0.1, -0.1};
  Trajectory run(const ControlLaw& c, const ModelParams& plant, const ActuatorModel& act = {}) const {
    return rollout(c, plant, x0, 3.0, 0.002, act);
  }
};

void expect_same(const Trajectory& a, const Trajectory& b) {
  EXPECT_EQ(a.t, b.t);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.commanded, b.commanded);
  EXPECT_EQ(a.applied, b.applied);
  EXPECT_EQ(a.tag, b.tag);
}

TEST(Wrappers, IdentityLevelsReproduceBaselineBitwise) {
  const Loop lp;
  const Trajectory base = lp.run(lp.law(), lp.params);
  expect_same(lp.run(wrap_measurement_noise(lp.law(), 0.0, 5), lp.params), base);
  expect_same(lp.run(lp.law(), lp.params, wrap_torque_noise(0.0, 5)), base);
  expect_same(lp.run(lp.law(), lp.params, wrap_torque_response(1.0)), base);
  expect_same(lp.run(wrap_time_delay(lp.law(), 0), lp.params), base);
  expect_same(lp.run(lp.law(), wrap_model_inaccuracy(lp.params, 0.0, 5)), base);
}

TEST(Wrappers, MeasurementNoiseDoesNotTouchThePlant) {
  const Loop lp;
  // Open-loop torque schedule: ignores the measurement entirely.
  auto open_loop = [] {
    auto k = std::make_shared<int>(0);
    return ControlLaw([k](const State&) {
      const double u = 2.0 * std::sin(0.01 * (*k)++);
      return Command{Torque(u, 0.0), ControllerTag::Sac};
    });
  };
  const Trajectory plain = lp.run(open_loop(), lp.params);
  const Trajectory noisy = lp.run(wrap_measurement_noise(open_loop(), 0.5, 9), lp.params);
  expect_same(noisy, plain);
  for (std::size_t i = 0; i < plain.size(); i += 100)
    EXPECT_EQ(energy(noisy.x[i], lp.params).total(), energy(plain.x[i], lp.params).total());
}

TEST(Wrappers, MeasurementNoiseIsSeededAndReachesController) {
  auto seen = std::make_shared<std::vector<State>>();
  const ControlLaw spy = [seen](const State& x) {
    seen->push_back(x);
    return Command{};
  };
  ControlLaw a = wrap_measurement_noise(spy, 0.1, 3);
  for (int i = 0; i < 1000; ++i) a(State{});
  const std::vector<State> first = *seen;
  seen->clear();
  ControlLaw b = wrap_measurement_noise(spy, 0.1, 3);
  for (int i = 0; i < 1000; ++i) b(State{});
  EXPECT_EQ(*seen, first);
  double ss = 0.0;
  for (const State& s : first) ss += s.vec().squaredNorm();
  EXPECT_NEAR(std::sqrt(ss / 4000.0), 0.1, 0.01);
}

TEST(Wrappers, TorqueNoiseStatistics) {
  ActuatorModel act = wrap_torque_noise(0.3, 4);
  double sum = 0.0, ss = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Torque d = act(Torque(1.0, -1.0)) - Torque(1.0, -1.0);
    sum += d.sum();
    ss += d.squaredNorm();
  }
  EXPECT_NEAR(sum / (2 * n), 0.0, 0.01);
  EXPECT_NEAR(std::sqrt(ss / (2 * n)), 0.3, 0.01);
}

TEST(Wrappers, TorqueResponseFirstOrder) {
  ActuatorModel act = wrap_torque_response(0.25);
  Torque prev = Torque::Zero();
  for (int i = 0; i < 20; ++i) {
    const Torque cmd(std::cos(i), 0.5 * i);
    const Torque expected = prev + 0.25 * (cmd - prev);
    const Torque got = act(cmd);
    EXPECT_NEAR((got - expected).norm(), 0.0, 1e-14);
    prev = got;
  }
  EXPECT_THROW(wrap_torque_response(0.0), ConfigError);
  EXPECT_THROW(wrap_torque_response(2.5), ConfigError);
}

TEST(Wrappers, TimeDelayShiftsMeasurements) {
  auto seen = std::make_shared<std::vector<State>>();
  ControlLaw delayed = wrap_time_delay([seen](const State& x) {
    seen->push_back(x);
    return Command{};
  }, 3);
  for (int i = 0; i < 10; ++i) delayed(State{1.0 + i, 0.0, 0.0, 0.0});
  ASSERT_EQ(seen->size(), 10u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ((*seen)[i], State{});
  for (int i = 3; i < 10; ++i) EXPECT_EQ((*seen)[i].p1, 1.0 + (i - 3));
  EXPECT_THROW(wrap_time_delay([](const State&) { return Command{}; }, -1), ConfigError);
}

TEST(Wrappers, ModelInaccuracyBounds) {
  const ModelParams nominal = ModelParams::defaults(Actuation::Pendubot);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ModelParams p = wrap_model_inaccuracy(nominal, 0.3, seed);
    EXPECT_EQ(p, wrap_model_inaccuracy(nominal, 0.3, seed));
    for (auto [a, b] : {std::pair{p.m1, nominal.m1}, {p.m2, nominal.m2}, {p.l1, nominal.l1},
                        {p.l2, nominal.l2}, {p.I1, nominal.I1}, {p.I2, nominal.I2},
                        {p.b1, nominal.b1}, {p.b2, nominal.b2}}) {
      EXPECT_GE(a, 0.7 * b - 1e-15);
      EXPECT_LE(a, 1.3 * b + 1e-15);
    }
    EXPECT_LE(p.r1, p.l1);
    EXPECT_LE(p.r2, p.l2);
    EXPECT_EQ(p.g, nominal.g);
    EXPECT_EQ(p.tau_max, nominal.tau_max);
    EXPECT_NO_THROW(p.validate());
  }
  EXPECT_THROW(wrap_model_inaccuracy(nominal, 0.6, 0), ConfigError);
}

TEST(PerturbationSpec, DefaultsAndValidation) {
  for (PerturbationKind k : kAllPerturbationKinds) {
    const PerturbationSpec s = PerturbationSpec::defaults(k);
    EXPECT_EQ(s.levels.size(), 10u);
    EXPECT_NO_THROW(s.validate());
    EXPECT_EQ(perturbation_kind_from_string(to_string(k)), k);
  }
  PerturbationSpec s = PerturbationSpec::defaults(PerturbationKind::TorqueNoise);
  s.levels = {0.1, 0.1};
  EXPECT_THROW(s.validate(), ConfigError);
  s.levels = {-0.1};
  EXPECT_THROW(s.validate(), ConfigError);
  s.kind = PerturbationKind::TimeDelay;
  s.levels = {1.5};
  EXPECT_THROW(s.validate(), ConfigError);
  EXPECT_THROW(perturbation_kind_from_string("gusts"), ConfigError);
}

std::vector<PerturbationSpec> all_defaults(std::uint64_t seed) {
  std::vector<PerturbationSpec> specs;
  for (PerturbationKind k : kAllPerturbationKinds)
    specs.push_back(PerturbationSpec::defaults(k, derive_seed(seed, {static_cast<std::uint64_t>(k)})));
  return specs;
}

RobustnessSetup short_setup(SuccessCriteria c) {
  RobustnessSetup s;
  s.horizon_s = 2.5;
  s.criteria = std::move(c);
  return s;
}

ControllerFactory zero_factory() {
  return [] { return ControlLaw([](const State&) { return Command{}; }); };
}

TEST(Robustness, AlwaysSucceed) {
  SuccessCriteria c = pendubot_criteria(1e300);
  c.height_frac = -2.0;  // any configuration counts as "up"
  const RobustnessReport r = robustness_suite(zero_factory(), c.params, all_defaults(1), short_setup(c));
  ASSERT_EQ(r.kinds.size(), 5u);
  for (const KindResult& k : r.kinds) EXPECT_EQ(k.fraction, 1.0);
  EXPECT_EQ(r.overall, 1.0);
}

TEST(Robustness, AlwaysFail) {
  const SuccessCriteria c = pendubot_criteria();
  const RobustnessReport r = robustness_suite(zero_factory(), c.params, all_defaults(1), short_setup(c));
  for (const KindResult& k : r.kinds) EXPECT_EQ(k.fraction, 0.0);
  EXPECT_EQ(r.overall, 0.0);
}

TEST(Robustness, OverallIsMeanAndParallelMatchesSequential) {
  const Loop lp;
  SuccessCriteria c = pendubot_criteria();
  c.roa.S = lp.design.S;
  c.roa.rho = 5.0;
  RobustnessSetup setup = short_setup(c);
  setup.x0 = lp.x0;
  const ControllerFactory factory = [&lp] { return lp.law(); };
  const RobustnessReport seq = robustness_suite(factory, lp.params, all_defaults(2), setup);
  setup.threads = 4;
  const RobustnessReport par = robustness_suite(factory, lp.params, all_defaults(2), setup);
  ASSERT_EQ(seq.kinds.size(), par.kinds.size());
  double sum = 0.0;
  int passed = 0, total = 0;
  for (std::size_t i = 0; i < seq.kinds.size(); ++i) {
    EXPECT_EQ(seq.kinds[i].success, par.kinds[i].success);
    EXPECT_EQ(seq.kinds[i].fraction, par.kinds[i].fraction);
    EXPECT_GE(seq.kinds[i].fraction, 0.0);
    EXPECT_LE(seq.kinds[i].fraction, 1.0);
    sum += seq.kinds[i].fraction;
    for (bool ok : seq.kinds[i].success) {
      passed += ok;
      ++total;
    }
  }
  EXPECT_NEAR(seq.overall, sum / 5.0, 1e-12);
  EXPECT_EQ(seq.overall, par.overall);
  // A mixed outcome makes the comparison meaningful.
  EXPECT_GT(passed, 0);
  EXPECT_LT(passed, total);
  std::ostringstream a, b;
  write_robustness_levels_csv(a, seq);
  write_robustness_levels_csv(b, par);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Robustness, RequiresAllKinds) {
  const SuccessCriteria c = pendubot_criteria();
  std::vector<PerturbationSpec> specs = all_defaults(1);
  specs.pop_back();
  EXPECT_THROW(robustness_suite(zero_factory(), c.params, specs, short_setup(c)), ConfigError);
}

TEST(Robustness, SummaryCsv) {
  RobustnessReport r;
  r.kinds.push_back({PerturbationKind::TorqueNoise, {0.0, 0.5}, {true, false}, 0.5});
  r.overall = 0.5;
  std::ostringstream os;
  write_robustness_summary_csv(os, r);
  EXPECT_EQ(os.str(), "kind,score\ntorque_noise,0.5\noverall,0.5\n");
  std::ostringstream lv;
  write_robustness_levels_csv(lv, r);
  EXPECT_EQ(lv.str(), "kind,level,success\ntorque_noise,0,1\ntorque_noise,0.5,0\n");
}

}  // namespace
}  // namespace swingup
