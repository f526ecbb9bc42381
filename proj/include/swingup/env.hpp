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

#include <Eigen/Dense>

#include "swingup/dynamics.hpp"
#include "swingup/rng.hpp"
#include "swingup/types.hpp"

namespace swingup {

enum class Robot { Pendubot, Acrobot };

std::string to_string(Robot r);
Robot robot_from_string(const std::string& s);
inline Actuation actuation_of(Robot r) {
  return r == Robot::Pendubot ? Actuation::Pendubot : Actuation::Acrobot;
}

/// Three-stage shaped reward: quadratic tracking, a height bonus, an
/// RoA bonus, and velocity penalties.
struct RewardParams {
  Vec4 q_train = Vec4::Zero();
  double r_train = 0.0;
  double r_line = 0.0;
  double r_vel = 0.0;
  double r_lqr = 0.0;
  double h_line_frac = 0.8;
  double v_thresh = 8.0;
  Mat4 s_lqr = Mat4::Identity();
  double rho = 0.0;
  State goal = upright_goal();

  void validate() const;

  /// Reward weights for the given robot. s_lqr and rho are left at
  /// placeholders; they come from the LQR/RoA pipeline.
  static RewardParams defaults(Robot robot);
};

struct EnvConfig {
  Robot robot = Robot::Pendubot;
  double dt = 0.01;
  int episode_len = 500;
  double v_max = 20.0;
  double tau_max = 5.0;
  double reset_noise = 0.01;  // ± uniform on every state component
  RewardParams reward;

  void validate() const;
  static EnvConfig defaults(Robot robot);
};

/// Agent observation: angles mapped by ((p mod 2π) - π)/π, velocities
/// clamped to ±v_max and divided by v_max.
Vec4 normalize_state(const State& x, double v_max);

/// τ = tau_max·u on the actuated joint(s), 0 elsewhere. Components outside
/// [-1, 1] are clamped and counted in `violations` when non-null.
Torque scale_action(const Eigen::VectorXd& u, double tau_max, Actuation actuation,
                    int* violations = nullptr);

/// u is the actuated-joint torque.
double reward(const State& x, double u, const RewardParams& rp, const ModelParams& params);

struct StepResult {
  Vec4 obs;
  double reward = 0.0;
  bool done = false;
};

/// Fixed-length episodic environment at the training rate.
class SwingupEnv {
 public:
  SwingupEnv(EnvConfig config, ModelParams params);

  Vec4 reset(Rng& rng);
  /// Throws NumericalError (episode aborted) on a non-finite state.
  StepResult step(const Eigen::VectorXd& action);

  const State& state() const { return state_; }
  int steps() const { return steps_; }
  /// Restores the episode position (checkpoint resume).
  void set_state(const State& x, int steps);

  int action_dim() const { return params_.num_inputs(); }
  const EnvConfig& config() const { return config_; }
  const ModelParams& params() const { return params_; }
  int clamp_violations() const { return clamp_violations_; }

 private:
  EnvConfig config_;
  ModelParams params_;
  State state_;
  int steps_ = 0;
  bool active_ = false;
  int clamp_violations_ = 0;
};

}  // namespace swingup
