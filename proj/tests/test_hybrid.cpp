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
#include <sstream>

#include "swingup/env.hpp"
#include "swingup/errors.hpp"
#include "swingup/hybrid.hpp"
#include "swingup/sac.hpp"

namespace swingup {
namespace {

struct Fixture {
  ModelParams params = ModelParams::defaults(Actuation::Pendubot);
  LqrDesign design = design_lqr(params, LqrWeights::pendubot_defaults());
  RoaEstimate roa;
  Mlp policy{std::vector<int>{4, 16, 2}};

  Fixture() {
    RoaConfig rc;
    rc.seed = 7;
    rc.n_samples = 50;
    roa = estimate_rho(design, params, rc);
    Rng rng(3);
    policy.init(rng);
  }

  HybridController controller() const { return HybridController(policy, design, roa); }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

TEST(Hybrid, GoalUsesLqrWithZeroTorque) {
  const Command c = fixture().controller().control(upright_goal());
  EXPECT_EQ(c.tag, ControllerTag::Lqr);
  EXPECT_LT(c.torque.norm(), 1e-12);
}

TEST(Hybrid, BottomUsesPolicyMean) {
  const Fixture& f = fixture();
  const State bottom{};
  ASSERT_GT(cost_to_go(bottom, f.roa), f.roa.rho);
  const Command c = f.controller().control(bottom);
  EXPECT_EQ(c.tag, ControllerTag::Sac);
  const Eigen::VectorXd a = policy_mean(f.policy, normalize_state(bottom, 20.0));
  EXPECT_EQ(c.torque, Torque(5.0 * a[0], 0.0));
}

TEST(Hybrid, StatelessControl) {
  const HybridController ctrl = fixture().controller();
  const State x{0.3, -0.2, 1.0, 0.5};
  const Command a = ctrl.control(x);
  ctrl.control(upright_goal());
  const Command b = ctrl.control(x);
  EXPECT_EQ(a.torque, b.torque);
  EXPECT_EQ(a.tag, b.tag);
}

TEST(Hybrid, RejectsMismatchedRoa) {
  const Fixture& f = fixture();
  RoaEstimate other = f.roa;
  other.S *= 2.0;
  EXPECT_THROW(HybridController(f.policy, f.design, other), ConfigError);
  EXPECT_THROW(HybridController(f.policy, f.design, f.roa, 20.0, 5.0, 0.0), ConfigError);
  EXPECT_THROW(HybridController(Mlp({4, 3, 4}), f.design, f.roa), ConfigError);
}

TEST(Rollout, ShortestHorizonIsOneStep) {
  const Fixture& f = fixture();
  const Trajectory tr = rollout(f.controller(), f.params, State{}, 0.002);
  ASSERT_EQ(tr.size(), 1u);
  EXPECT_EQ(tr.t[0], 0.0);
  EXPECT_EQ(tr.x[0], State{});
}

TEST(Rollout, LengthAndGrid) {
  const Fixture& f = fixture();
  const Trajectory tr = rollout(f.controller(), f.params, State{}, 1.0);
  ASSERT_EQ(tr.size(), 500u);
  for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_EQ(tr.t[i], 0.002 * static_cast<double>(i));
  EXPECT_FALSE(tr.diverged);
}

TEST(Rollout, HoldsGoal) {
  const Fixture& f = fixture();
  const Trajectory tr = rollout(f.controller(), f.params, upright_goal(), 10.0);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_LT((tr.x[i].vec() - upright_goal().vec()).norm(), 1e-3);
    EXPECT_EQ(tr.tag[i], ControllerTag::Lqr);
  }
}

TEST(Rollout, TagNeverRevertsAfterEnteringRoa) {
  const Fixture& f = fixture();
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    RoaEstimate inner = f.roa;
    inner.rho *= 0.9;
    const State x0 = sample_in_ellipsoid(inner, rng);
    const Trajectory tr = rollout(f.controller(), f.params, x0, 5.0);
    std::size_t first = tr.size();
    for (std::size_t i = 0; i < tr.size(); ++i) {
      if (tr.tag[i] == ControllerTag::Lqr) {
        first = i;
        break;
      }
    }
    ASSERT_LT(first, tr.size());
    for (std::size_t i = first; i < tr.size(); ++i)
      ASSERT_EQ(tr.tag[i], ControllerTag::Lqr) << "trial " << trial << " step " << i;
  }
}

TEST(Rollout, AppliedTorqueRespectsLimitsAndActuation) {
  const Fixture& f = fixture();
  // An actuator that overshoots on both joints, to exercise the clip and mask.
  const ActuatorModel wild = [](const Torque& t) { return Torque(3.0 * t[0] + 4.0, -7.0); };
  const HybridController ctrl = f.controller();
  const Trajectory tr = rollout([&](const State& x) { return ctrl.control(x); }, f.params,
                                State{0.1, 0.0, 0.0, 0.0}, 2.0, 0.002, wild);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_LE(std::abs(tr.applied[i][0]), f.params.tau_max);
    EXPECT_EQ(tr.applied[i][1], 0.0);
    EXPECT_EQ(tr.commanded[i][1], 0.0);
  }
}

TEST(Rollout, AppliedEqualsCommandedWithoutWrapper) {
  const Fixture& f = fixture();
  const Trajectory tr = rollout(f.controller(), f.params, State{}, 1.0);
  for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_EQ(tr.applied[i], tr.commanded[i]);
}

TEST(Rollout, Deterministic) {
  const Fixture& f = fixture();
  const Trajectory a = rollout(f.controller(), f.params, State{0.01, 0, 0, 0}, 2.0);
  const Trajectory b = rollout(f.controller(), f.params, State{0.01, 0, 0, 0}, 2.0);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.applied, b.applied);
  EXPECT_EQ(a.tag, b.tag);
}

TEST(Rollout, DivergenceKeepsPartialRecord) {
  ModelParams p = fixture().params;
  const ControlLaw blowup = [](const State&) {
    return Command{Torque(1e300, 0.0), ControllerTag::Sac};
  };
  p.tau_max = 1e300;
  const Trajectory tr = rollout(blowup, p, State{}, 1.0, 0.002);
  EXPECT_TRUE(tr.diverged);
  EXPECT_FALSE(tr.diagnostic.empty());
  EXPECT_GE(tr.size(), 1u);
  EXPECT_LT(tr.size(), 500u);
}

TEST(Rollout, RejectsBadHorizon) {
  const Fixture& f = fixture();
  EXPECT_THROW(rollout(f.controller(), f.params, State{}, 0.0), ConfigError);
}

TEST(TrajectoryCsv, HeaderAndRoundTrip) {
  const Fixture& f = fixture();
  const Trajectory tr = rollout(f.controller(), f.params, State{0.2, -0.1, 0.3, 0.0}, 0.5);
  std::stringstream ss;
  write_trajectory_csv(ss, tr);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  EXPECT_EQ(header, "t,p1,p2,v1,v2,tau1_cmd,tau2_cmd,tau1_app,tau2_app,ctrl");
  const Trajectory back = read_trajectory_csv(ss);
  EXPECT_EQ(back.t, tr.t);
  EXPECT_EQ(back.x, tr.x);
  EXPECT_EQ(back.commanded, tr.commanded);
  EXPECT_EQ(back.applied, tr.applied);
  EXPECT_EQ(back.tag, tr.tag);
  EXPECT_EQ(back.dt, tr.t[1] - tr.t[0]);
}

TEST(TrajectoryCsv, RejectsMalformedInput) {
  std::stringstream bad_header("t,p1\n");
  EXPECT_THROW(read_trajectory_csv(bad_header), IoError);
  std::stringstream bad_tag(std::string(kTrajectoryHeader) + "\n0,0,0,0,0,0,0,0,0,PID\n");
  EXPECT_THROW(read_trajectory_csv(bad_tag), IoError);
  std::stringstream bad_num(std::string(kTrajectoryHeader) + "\n0,x,0,0,0,0,0,0,0,SAC\n");
  EXPECT_THROW(read_trajectory_csv(bad_num), IoError);
  std::stringstream short_row(std::string(kTrajectoryHeader) + "\n0,0,0\n");
  EXPECT_THROW(read_trajectory_csv(short_row), IoError);
}

}  // namespace
}  // namespace swingup
