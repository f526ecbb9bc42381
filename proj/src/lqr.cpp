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

#include "swingup/lqr.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "swingup/angles.hpp"
#include "swingup/errors.hpp"

namespace swingup {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

void LqrWeights::validate(int k) const {
  if ((q_diag.array() < 0.0).any() || !(q_diag.array() > 0.0).any() || !q_diag.allFinite())
    throw ConfigError("LQR Q diagonal must be >= 0 with at least one positive entry");
  if (R.rows() != k || R.cols() != k)
    throw ConfigError("LQR R must be " + std::to_string(k) + "x" + std::to_string(k));
  if ((R - R.transpose()).norm() > 0.0)
    throw ConfigError("LQR R must be symmetric");
  Eigen::LLT<MatrixXd> llt(R);
  if (llt.info() != Eigen::Success || !R.allFinite())
    throw ConfigError("LQR R must be positive definite");
}

LqrWeights LqrWeights::pendubot_defaults() {
  LqrWeights w;
  w.q_diag << 1.92, 1.92, 0.3, 0.3;
  w.R = MatrixXd::Constant(1, 1, 0.82);
  return w;
}

LqrWeights LqrWeights::acrobot_defaults() {
  LqrWeights w;
  w.q_diag << 0.97, 0.93, 0.39, 0.26;
  w.R = MatrixXd::Constant(1, 1, 0.11);
  return w;
}

double care_residual(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q,
                     const MatrixXd& R, const MatrixXd& S) {
  const MatrixXd res = A.transpose() * S + S * A -
                       S * B * R.llt().solve(B.transpose() * S) + Q;
  return res.norm() / Q.norm();
}

MatrixXd solve_lyapunov(const MatrixXd& A, const MatrixXd& C) {
  const Eigen::Index n = A.rows();
  // A = U T Uᴴ. With X = U Y Uᴴ the equation becomes Tᴴ Y + Y T = -Uᴴ C U.
  Eigen::ComplexSchur<MatrixXd> schur(A);
  if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
  const MatrixXcd& U = schur.matrixU();
  const MatrixXcd& T = schur.matrixT();
  const MatrixXcd D = -(U.adjoint() * C.cast<std::complex<double>>() * U);
  const MatrixXcd Th = T.adjoint();

  MatrixXcd Y = MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    VectorXcd rhs = D.col(j);
    for (Eigen::Index k = 0; k < j; ++k) rhs -= Y.col(k) * T(k, j);
    // (Tᴴ + T(j,j) I) is lower triangular.
    MatrixXcd L = Th;
    L.diagonal().array() += T(j, j);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(L(i, i)) < 1e-14)
        throw NumericalError("Lyapunov equation is singular (A has eigenvalues summing to zero)");
    }
    Y.col(j) = L.triangularView<Eigen::Lower>().solve(rhs);
  }
  MatrixXd X = (U * Y * U.adjoint()).real();
  return 0.5 * (X + X.transpose());
}

namespace {

bool is_hurwitz(const MatrixXd& M) {
  return (M.eigenvalues().real().array() < 0.0).all();
}

MatrixXd ackermann_gain(const MatrixXd& A, const MatrixXd& b) {
  const Eigen::Index n = A.rows();
  MatrixXd ctrb(n, n);
  ctrb.col(0) = b;
  for (Eigen::Index i = 1; i < n; ++i) ctrb.col(i) = A * ctrb.col(i - 1);
  Eigen::FullPivLU<MatrixXd> lu(ctrb);
  if (lu.rank() < n) throw NumericalError("(A, B) is not controllable; no stabilizing seed gain");

  // Desired poles: real, distinct, left of every open-loop eigenvalue.
  const double radius = std::max(1.0, A.eigenvalues().cwiseAbs().maxCoeff());
  VectorXd coeffs = VectorXd::Zero(n + 1);  // monic, highest power first
  coeffs[0] = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pole = -radius * (1.0 + 0.5 * static_cast<double>(i));
    for (Eigen::Index k = i + 1; k >= 1; --k) coeffs[k] -= pole * coeffs[k - 1];
  }
  MatrixXd phi = MatrixXd::Zero(n, n);
  MatrixXd power = MatrixXd::Identity(n, n);
  for (Eigen::Index k = n; k >= 0; --k) {
    phi += coeffs[k] * power;
    power = power * A;
  }
  VectorXd last = VectorXd::Zero(n);
  last[n - 1] = 1.0;
  const VectorXd row = lu.transpose().solve(last);  // eₙᵀ C⁻¹
  return row.transpose() * phi;
}

MatrixXd bass_gain(const MatrixXd& A, const MatrixXd& B) {
  const Eigen::Index n = A.rows();
  const double shift = 1.0 + A.eigenvalues().real().cwiseAbs().maxCoeff() +
                       A.norm();
  // (-(A + βI))ᵀ P + P(-(A + βI)) + 2BBᵀ = 0 with -(A + βI) Hurwitz.
  const MatrixXd Ashift = -(A + shift * MatrixXd::Identity(n, n)).transpose();
  const MatrixXd P = solve_lyapunov(Ashift, 2.0 * B * B.transpose());
  Eigen::LLT<MatrixXd> llt(P);
  if (llt.info() != Eigen::Success)
    throw NumericalError("(A, B) is not controllable; no stabilizing seed gain");
  return B.transpose() * llt.solve(MatrixXd::Identity(n, n));
}

}  // namespace

MatrixXd stabilizing_gain(const MatrixXd& A, const MatrixXd& B) {
  MatrixXd K = B.cols() == 1 ? ackermann_gain(A, B) : bass_gain(A, B);
  if (!is_hurwitz(A - B * K))
    throw NumericalError("seed gain does not stabilize (A, B)");
  return K;
}

CareSolution solve_care(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q,
                        const MatrixXd& R, const CareOptions& options) {
  const Eigen::LLT<MatrixXd> r_llt(R);
  const double scale = std::max(1.0, Q.norm());
  CareSolution sol;
  sol.K = stabilizing_gain(A, B);
  double best = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iterations; ++it) {
    const MatrixXd Acl = A - B * sol.K;
    sol.S = solve_lyapunov(Acl, Q + sol.K.transpose() * R * sol.K);
    sol.K = r_llt.solve(B.transpose() * sol.S);
    sol.iterations = it;
    const MatrixXd res = A.transpose() * sol.S + sol.S * A -
                         sol.S * B * sol.K + Q;
    const double abs_res = res.norm();
    sol.residual = abs_res / Q.norm();
    if (!std::isfinite(abs_res)) break;
    if (abs_res <= options.tolerance * scale) return sol;
    // Quadratic convergence has stalled at round-off level.
    if (it > 5 && abs_res >= best && abs_res <= 1e3 * options.tolerance * scale) return sol;
    best = std::min(best, abs_res);
  }
  std::ostringstream msg;
  msg << "CARE Newton-Kleinman did not converge after " << sol.iterations
      << " iterations (relative residual " << sol.residual << ")";
  throw NumericalError(msg.str());
}

Eigen::VectorXcd LqrDesign::closed_loop_eigenvalues() const {
  const MatrixXd Acl = MatrixXd(A) - B * K;
  return Acl.eigenvalues();
}

LqrDesign design_lqr(const ModelParams& params, const LqrWeights& weights,
                     const CareOptions& options) {
  params.validate();
  weights.validate(params.num_inputs());
  LqrDesign d;
  d.goal = upright_goal();
  d.actuation = params.actuation;
  const Linearization lin = linearize(d.goal, Torque::Zero(), params);
  d.A = lin.A;
  d.B = lin.B;
  const CareSolution sol = solve_care(lin.A, lin.B, weights.Q(), weights.R, options);
  d.S = sol.S;
  d.K = sol.K;
  d.iterations = sol.iterations;
  d.residual = sol.residual;
  return d;
}

Torque lqr_control(const State& x, const LqrDesign& design, double tau_max) {
  const VectorXd u = -design.K * wrapped_error(x, design.goal);
  Torque tau = Torque::Zero();
  auto clip = [tau_max](double v) { return std::clamp(v, -tau_max, tau_max); };
  switch (design.actuation) {
    case Actuation::Pendubot: tau[0] = clip(u[0]); break;
    case Actuation::Acrobot: tau[1] = clip(u[0]); break;
    case Actuation::Full:
      tau[0] = clip(u[0]);
      tau[1] = clip(u[1]);
      break;
  }
  return tau;
}

}  // namespace swingup
