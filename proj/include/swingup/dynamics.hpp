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

#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "swingup/types.hpp"

namespace swingup {

/// Physical constants of the double pendulum. Inertias are about each link's
/// center of mass; r1, r2 are COM distances from the proximal joint.
struct ModelParams {
  double m1 = 0.6;
  double m2 = 0.6;
  double l1 = 0.3;
  double l2 = 0.2;
  double r1 = 0.3;
  double r2 = 0.2;
  double I1 = 0.002;
  double I2 = 0.001;
  double g = 9.81;
  double b1 = 0.001;
  double b2 = 0.001;
  double tau_max = 5.0;
  Actuation actuation = Actuation::Pendubot;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  /// Number of actuated joints (1 for pendubot/acrobot, 2 for full).
  int num_inputs() const { return actuation == Actuation::Full ? 2 : 1; }

  /// 2 x k selection matrix mapping actuator inputs to joint torques.
  Eigen::MatrixXd input_matrix() const;

  /// Zeroes the torque of any non-actuated joint.
  Torque mask(const Torque& tau) const;

  static ModelParams defaults(Actuation actuation = Actuation::Pendubot);

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

std::string to_string(Actuation a);
Actuation actuation_from_string(const std::string& s);

/// Reads a flat key/value object. Every key listed in ModelParams must be
/// present exactly once; unknown keys are rejected.
ModelParams model_params_from_json(const nlohmann::json& j);
/// Applies the keys present in `j` on top of `base` (unknown keys rejected).
ModelParams model_params_overlay(const ModelParams& base, const nlohmann::json& j);
nlohmann::json model_params_to_json(const ModelParams& p);
ModelParams load_model_params(const std::string& path);

Mat2 mass_matrix(const Vec2& q, const ModelParams& p);

/// Coriolis/centrifugal matrix in the Christoffel convention, so that
/// Ṁ - 2C is skew-symmetric.
Mat2 coriolis_matrix(const Vec2& q, const Vec2& qd, const ModelParams& p);

/// dM/dt along (q, q̇).
Mat2 mass_matrix_rate(const Vec2& q, const Vec2& qd, const ModelParams& p);

Vec2 gravity_vector(const Vec2& q, const ModelParams& p);
Vec2 friction_torque(const Vec2& qd, const ModelParams& p);

/// q̈ = M⁻¹(τ - C q̇ - G - F). The torque of a non-actuated joint is forced
/// to zero. Throws NumericalError if M is numerically singular.
Accel forward_dynamics(const State& x, const Torque& tau, const ModelParams& p);

/// ẋ = f(x, τ).
Vec4 state_derivative(const State& x, const Torque& tau, const ModelParams& p);

/// One classical RK4 step with zero-order-hold torque. Throws
/// NumericalError when the result is not finite.
State step_rk4(const State& x, const Torque& tau, double dt, const ModelParams& p);

struct Energy {
  double kinetic = 0.0;
  double potential = 0.0;
  double total() const { return kinetic + potential; }
};

/// Potential energy is zero at the hanging-down rest configuration.
Energy energy(const State& x, const ModelParams& p);

struct Linearization {
  Mat4 A;
  Eigen::MatrixXd B;  // 4 x k
};

/// Analytic Jacobians of ẋ = f(x, u) at (x0, tau0), where u are the
/// actuated-joint torques.
Linearization linearize(const State& x0, const Torque& tau0, const ModelParams& p);

/// h = -l1 cos(p1) - l2 cos(p1 + p2).
double end_effector_height(double p1, double p2, const ModelParams& p);

}  // namespace swingup
