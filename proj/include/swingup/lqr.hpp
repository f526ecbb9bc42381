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
#include "swingup/types.hpp"

namespace swingup {

/// Diagonal state cost and positive-definite control cost.
struct LqrWeights {
  Vec4 q_diag = Vec4::Ones();
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(1, 1);

  Eigen::MatrixXd Q() const { return q_diag.asDiagonal(); }
  /// Throws ConfigError unless Q ⪰ 0 (nonzero) and R is k x k SPD.
  void validate(int k) const;

  static LqrWeights pendubot_defaults();
  static LqrWeights acrobot_defaults();
};

struct CareOptions {
  double tolerance = 1e-10;  // on ‖residual‖_F / max(1, ‖Q‖_F)
  int max_iterations = 100;
};

struct CareSolution {
  Eigen::MatrixXd S;
  Eigen::MatrixXd K;
  int iterations = 0;
  double residual = 0.0;  // relative Frobenius residual
};

/// ‖AᵀS + SA - SBR⁻¹BᵀS + Q‖_F / ‖Q‖_F.
double care_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                     const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                     const Eigen::MatrixXd& S);

/// Solves AᵀX + XA + C = 0 for a Hurwitz A by complex Schur reduction and
/// triangular back-substitution.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C);

/// A gain K with A - BK Hurwitz. Single-input pairs use Ackermann's pole
/// placement; multi-input pairs use Bass's shifted-Lyapunov construction.
/// Throws NumericalError when (A, B) is not controllable.
Eigen::MatrixXd stabilizing_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// Newton–Kleinman iteration for the continuous algebraic Riccati equation.
/// Throws NumericalError on non-convergence, reporting iterations and residual.
CareSolution solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                        const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                        const CareOptions& options = {});

struct LqrDesign {
  Eigen::MatrixXd K;  // k x 4
  Mat4 S;
  State goal;
  Actuation actuation = Actuation::Pendubot;
  Mat4 A;
  Eigen::MatrixXd B;
  int iterations = 0;
  double residual = 0.0;

  /// Eigenvalues of A - BK.
  Eigen::VectorXcd closed_loop_eigenvalues() const;
};

/// Linearizes at the upright goal and solves the CARE.
LqrDesign design_lqr(const ModelParams& params, const LqrWeights& weights,
                     const CareOptions& options = {});

/// u = -K·wrap(x - goal), clipped to ±tau_max and routed to the actuated
/// joint(s).
Torque lqr_control(const State& x, const LqrDesign& design, double tau_max);

}  // namespace swingup
