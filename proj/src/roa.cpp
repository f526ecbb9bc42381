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

#include "swingup/roa.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "swingup/angles.hpp"
#include "swingup/errors.hpp"

namespace swingup {

namespace {

constexpr std::uint64_t kBoundaryTag = 0x524f41;  // per bisection-level samples
constexpr std::uint64_t kHeuristicTag = 0x484555;

// Rollouts whose error grows past this are counted as failures immediately.
constexpr double kDivergedNorm = 1e3;

Vec4 gaussian_direction(Rng& rng) {
  Vec4 z;
  do {
    for (int i = 0; i < 4; ++i) z[i] = rng.normal();
  } while (z.norm() == 0.0);
  return z.normalized();
}

// e with eᵀ S e = rho·|z|² for unit z.
Vec4 ellipsoid_point(const Mat4& S, double rho, const Vec4& z) {
  Eigen::LLT<Mat4> llt(S);
  if (llt.info() != Eigen::Success) throw NumericalError("cost-to-go matrix S is not positive definite");
  // S = L Lᵀ, e = sqrt(rho) L⁻ᵀ z.
  return std::sqrt(rho) * llt.matrixU().solve(z);
}

State from_error(const State& goal, const Vec4& e) {
  return {goal.p1 + e[0], goal.p2 + e[1], goal.v1 + e[2], goal.v2 + e[3]};
}

bool all_converge(const LqrDesign& design, const ModelParams& params,
                  const RoaConfig& cfg, double rho, std::uint64_t level) {
  const RoaEstimate candidate{design.S, rho, design.goal};
  auto sample_ok = [&](int i) {
    Rng rng(derive_seed(cfg.seed, {kBoundaryTag, level, static_cast<std::uint64_t>(i)}));
    const State x0 = sample_on_ellipsoid(candidate, rng);
    return lqr_converges(x0, design, params, cfg.horizon_s, cfg.dt, cfg.eps);
  };

  if (cfg.threads <= 1) {
    for (int i = 0; i < cfg.n_samples; ++i)
      if (!sample_ok(i)) return false;
    return true;
  }

  // AND-reduction; the early-exit flag only skips work, never changes the result.
  std::atomic<bool> ok{true};
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < cfg.threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < cfg.n_samples && ok.load(); i = next++)
        if (!sample_ok(i)) ok = false;
    });
  }
  for (auto& th : pool) th.join();
  return ok.load();
}

}  // namespace

void RoaConfig::validate() const {
  if (n_samples <= 0) throw ConfigError("roa.n_samples must be positive");
  if (bisection_iters <= 0) throw ConfigError("roa.bisection_iters must be positive");
  if (!(horizon_s > 0.0)) throw ConfigError("roa.horizon_s must be positive");
  if (!(eps > 0.0)) throw ConfigError("roa.eps must be positive");
  if (!(dt > 0.0)) throw ConfigError("roa.dt must be positive");
  if (!(rho_max >= 0.0)) throw ConfigError("roa.rho_max must be >= 0");
  if (!(linearization_tolerance > 0.0)) throw ConfigError("roa.linearization_tolerance must be positive");
  if (threads < 1) throw ConfigError("roa.threads must be >= 1");
}

double cost_to_go(const State& x, const RoaEstimate& est) {
  const Vec4 e = wrapped_error(x, est.goal);
  return e.dot(est.S * e);
}

bool in_roa(const State& x, const RoaEstimate& est) {
  return cost_to_go(x, est) <= est.rho;
}

State sample_on_ellipsoid(const RoaEstimate& est, Rng& rng) {
  return from_error(est.goal, ellipsoid_point(est.S, est.rho, gaussian_direction(rng)));
}

State sample_in_ellipsoid(const RoaEstimate& est, Rng& rng) {
  const Vec4 z = gaussian_direction(rng);
  const double radius = std::pow(rng.uniform(0.0, 1.0), 0.25);
  return from_error(est.goal, ellipsoid_point(est.S, est.rho, radius * z));
}

bool lqr_converges(const State& x0, const LqrDesign& design,
                   const ModelParams& params, double horizon_s, double dt,
                   double eps) {
  const long steps = std::lround(horizon_s / dt);
  State x = x0;
  for (long k = 0; k <= steps; ++k) {
    const double err = wrapped_error(x, design.goal).norm();
    if (err < eps) return true;
    if (k == steps || !(err < kDivergedNorm)) return false;
    try {
      x = step_rk4(x, lqr_control(x, design, params.tau_max), dt, params);
    } catch (const NumericalError&) {
      return false;
    }
  }
  return false;
}

double heuristic_rho_max(const LqrDesign& design, const ModelParams& params,
                         const RoaConfig& cfg) {
  if (cfg.rho_max > 0.0) return cfg.rho_max;
  const double gravity_scale =
      params.g * (params.m1 * params.r1 + params.m2 * (params.l1 + params.r2));
  const Mat2 M_goal = mass_matrix(design.goal.q(), params);
  const Eigen::MatrixXd B_acc = design.B.bottomRows(2);
  const Eigen::Matrix<double, 2, 4> A_acc = design.A.bottomRows<2>();
  constexpr int kProbe = 64;

  double accepted = 0.0;
  for (int j = 0; j < 60; ++j) {
    const double rho = 1e-3 * std::ldexp(1.0, j);
    const RoaEstimate candidate{design.S, rho, design.goal};
    Rng rng(derive_seed(cfg.seed, {kHeuristicTag, static_cast<std::uint64_t>(j)}));
    double worst = 0.0;
    for (int i = 0; i < kProbe; ++i) {
      const State x = sample_on_ellipsoid(candidate, rng);
      const Vec4 e = wrapped_error(x, design.goal);
      const Eigen::VectorXd u_lin = -design.K * e;
      const Torque tau = lqr_control(x, design, params.tau_max);
      const Vec2 acc_nl = forward_dynamics(x, tau, params).vec();
      const Vec2 acc_lin = A_acc * e + B_acc * u_lin;
      worst = std::max(worst, (M_goal * (acc_nl - acc_lin)).norm());
    }
    if (worst >= cfg.linearization_tolerance * gravity_scale) break;
    accepted = rho;
  }
  if (accepted == 0.0) accepted = 1e-3;
  return accepted;
}

RoaEstimate estimate_rho(const LqrDesign& design, const ModelParams& params,
                         const RoaConfig& cfg) {
  cfg.validate();
  const double rho_max = heuristic_rho_max(design, params, cfg);
  double lo = 0.0;
  double hi = rho_max;
  if (all_converge(design, params, cfg, hi, 0)) {
    lo = hi;
  } else {
    for (int it = 0; it < cfg.bisection_iters; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (all_converge(design, params, cfg, mid, static_cast<std::uint64_t>(it) + 1))
        lo = mid;
      else
        hi = mid;
    }
  }
  if (!(lo > 0.0))
    throw NumericalError("region-of-attraction estimate collapsed to rho = 0; "
                         "the LQR design does not stabilize any sampled neighborhood");
  return {design.S, lo, design.goal};
}

double verify_convergence_rate(const RoaEstimate& est, const LqrDesign& design,
                               const ModelParams& params, int n, double scale,
                               double horizon_s, double eps, std::uint64_t seed) {
  if (n <= 0) return 0.0;
  const RoaEstimate scaled{est.S, scale * est.rho, est.goal};
  int ok = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    if (lqr_converges(sample_in_ellipsoid(scaled, rng), design, params, horizon_s, 0.002, eps)) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(n);
}

}  // namespace swingup
