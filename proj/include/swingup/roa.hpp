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

#include <cstdint>

#include "swingup/dynamics.hpp"
#include "swingup/lqr.hpp"
#include "swingup/rng.hpp"
#include "swingup/types.hpp"

namespace swingup {

/// Ellipsoidal region of attraction {x : eᵀ S e <= rho}, e the wrapped error.
struct RoaEstimate {
  Mat4 S = Mat4::Identity();
  double rho = 0.0;
  State goal = upright_goal();
};

/// Falsification-based estimator settings.
struct RoaConfig {
  int n_samples = 200;        // boundary samples per bisection level
  int bisection_iters = 20;
  double horizon_s = 5.0;
  double eps = 1e-2;          // convergence radius on ‖e‖
  double dt = 0.002;          // closed-loop simulation step
  double rho_max = 0.0;       // 0 selects the linearization-error heuristic
  double linearization_tolerance = 0.5;  // fraction of the gravity torque scale
  std::uint64_t seed = 0;
  int threads = 1;            // >1 runs boundary rollouts in parallel

  void validate() const;
};

/// eᵀ S e with e = (wrap(p - p_g), v - v_g).
double cost_to_go(const State& x, const RoaEstimate& est);

/// Closed set: true iff cost_to_go(x) <= rho.
bool in_roa(const State& x, const RoaEstimate& est);

/// Point on {eᵀ S e = rho}: a Gaussian direction normalized through the
/// Cholesky factor of S.
State sample_on_ellipsoid(const RoaEstimate& est, Rng& rng);

/// Uniform point inside {eᵀ S e <= rho}.
State sample_in_ellipsoid(const RoaEstimate& est, Rng& rng);

/// Simulates the saturated LQR loop from x0; true once ‖e‖ < eps within
/// horizon_s.
bool lqr_converges(const State& x0, const LqrDesign& design,
                   const ModelParams& params, double horizon_s, double dt,
                   double eps);

/// Largest ρ in a doubling ladder for which the torque-space linearization
/// error on boundary samples stays below the configured fraction of
/// g(m1 r1 + m2(l1 + r2)).
double heuristic_rho_max(const LqrDesign& design, const ModelParams& params,
                         const RoaConfig& cfg);

/// Bisection on ρ over [0, ρ_max]: a level is accepted only if every boundary
/// sample converges. Throws NumericalError when ρ collapses to zero.
RoaEstimate estimate_rho(const LqrDesign& design, const ModelParams& params,
                         const RoaConfig& cfg);

/// Fraction of `n` fresh states drawn uniformly inside the ellipsoid scaled by
/// `scale` that converge to ‖e‖ < eps within horizon_s.
double verify_convergence_rate(const RoaEstimate& est, const LqrDesign& design,
                               const ModelParams& params, int n, double scale,
                               double horizon_s, double eps, std::uint64_t seed);

}  // namespace swingup
