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

#include "swingup/env.hpp"

#include <algorithm>
#include <cmath>

#include "swingup/angles.hpp"
#include "swingup/errors.hpp"

namespace swingup {

std::string to_string(Robot r) { return r == Robot::Pendubot ? "pendubot" : "acrobot"; }

Robot robot_from_string(const std::string& s) {
  if (s == "pendubot") return Robot::Pendubot;
  if (s == "acrobot") return Robot::Acrobot;
  throw ConfigError("unknown robot '" + s + "' (expected pendubot or acrobot)");
}

void RewardParams::validate() const {
  if ((q_train.array() < 0.0).any()) throw ConfigError("env.q_train entries must be >= 0");
  if (r_train < 0.0) throw ConfigError("env.r_train must be >= 0");
  if (!(h_line_frac > 0.0 && h_line_frac <= 1.0)) throw ConfigError("env.h_line_frac must lie in (0, 1]");
  if (!(v_thresh > 0.0)) throw ConfigError("env.v_thresh must be positive");
  if (rho < 0.0) throw ConfigError("reward rho must be >= 0");
}

RewardParams RewardParams::defaults(Robot robot) {
  RewardParams rp;
  if (robot == Robot::Pendubot) {
    rp.q_train << 8.0, 5.0, 0.1, 0.1;
    rp.r_vel = 0.0;
  } else {
    rp.q_train << 10.0, 10.0, 0.2, 0.2;
    rp.r_vel = 1e4;
  }
  rp.r_train = 1e-4;
  rp.r_line = 500.0;
  rp.r_lqr = 1e4;
  rp.h_line_frac = 0.8;
  rp.v_thresh = 8.0;
  return rp;
}

void EnvConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("env.dt must be positive");
  if (episode_len <= 0) throw ConfigError("env.episode_len must be positive");
  if (!(v_max > 0.0)) throw ConfigError("env.v_max must be positive");
  if (!(tau_max > 0.0)) throw ConfigError("env.tau_max must be positive");
  if (!(reset_noise >= 0.0)) throw ConfigError("env.reset_noise must be >= 0");
  reward.validate();
}

EnvConfig EnvConfig::defaults(Robot robot) {
  EnvConfig c;
  c.robot = robot;
  c.episode_len = robot == Robot::Pendubot ? 500 : 1000;
  c.reward = RewardParams::defaults(robot);
  return c;
}

Vec4 normalize_state(const State& x, double v_max) {
  auto angle = [](double p) {
    double m = std::fmod(p, 2.0 * M_PI);
    if (m < 0.0) m += 2.0 * M_PI;
    if (m >= 2.0 * M_PI) m = 0.0;
    return (m - M_PI) / M_PI;
  };
  auto vel = [v_max](double v) { return std::clamp(v, -v_max, v_max) / v_max; };
  return {angle(x.p1), angle(x.p2), vel(x.v1), vel(x.v2)};
}

Torque scale_action(const Eigen::VectorXd& u, double tau_max, Actuation actuation,
                    int* violations) {
  auto clip = [violations](double v) {
    if (v < -1.0 || v > 1.0) {
      if (violations != nullptr) ++*violations;
      return std::clamp(v, -1.0, 1.0);
    }
    return v;
  };
  Torque tau = Torque::Zero();
  switch (actuation) {
    case Actuation::Pendubot: tau[0] = tau_max * clip(u[0]); break;
    case Actuation::Acrobot: tau[1] = tau_max * clip(u[0]); break;
    case Actuation::Full:
      tau[0] = tau_max * clip(u[0]);
      tau[1] = tau_max * clip(u[1]);
      break;
  }
  return tau;
}

double reward(const State& x, double u, const RewardParams& rp, const ModelParams& params) {
  const Vec4 e = wrapped_error(x, rp.goal);
  double r = -e.dot(rp.q_train.asDiagonal() * e) - u * rp.r_train * u;
  const double h_line = rp.h_line_frac * (params.l1 + params.l2);
  if (end_effector_height(x.p1, x.p2, params) >= h_line) r += rp.r_line;
  // Bonus inside the RoA (cost-to-go <= rho).
  if (e.dot(rp.s_lqr * e) <= rp.rho) r += rp.r_lqr;
  if (std::abs(x.v1) >= rp.v_thresh) r -= rp.r_vel;
  if (std::abs(x.v2) >= rp.v_thresh) r -= rp.r_vel;
  return r;
}

SwingupEnv::SwingupEnv(EnvConfig config, ModelParams params)
    : config_(std::move(config)), params_(params) {
  config_.validate();
  params_.actuation = actuation_of(config_.robot);
  params_.tau_max = config_.tau_max;
  params_.validate();
}

Vec4 SwingupEnv::reset(Rng& rng) {
  const double s = config_.reset_noise;
  if (s > 0.0) {
    state_ = {rng.uniform(-s, s), rng.uniform(-s, s), rng.uniform(-s, s), rng.uniform(-s, s)};
  } else {
    state_ = {};
  }
  steps_ = 0;
  active_ = true;
  return normalize_state(state_, config_.v_max);
}

void SwingupEnv::set_state(const State& x, int steps) {
  state_ = x;
  steps_ = steps;
  active_ = steps < config_.episode_len;
}

StepResult SwingupEnv::step(const Eigen::VectorXd& action) {
  if (!active_) throw std::logic_error("env step called on a finished episode; call reset first");
  const Torque tau = scale_action(action, config_.tau_max, params_.actuation, &clamp_violations_);
  try {
    state_ = step_rk4(state_, tau, config_.dt, params_);
  } catch (const NumericalError& e) {
    active_ = false;
    throw NumericalError(std::string("episode aborted at step ") + std::to_string(steps_) + ": " + e.what());
  }
  ++steps_;
  const double u = params_.actuation == Actuation::Acrobot ? tau[1] : tau[0];
  StepResult out;
  out.reward = reward(state_, u, config_.reward, params_);
  out.done = steps_ >= config_.episode_len;
  if (out.done) active_ = false;
  out.obs = normalize_state(state_, config_.v_max);
  return out;
}

}  // namespace swingup
