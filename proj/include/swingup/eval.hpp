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
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swingup/hybrid.hpp"
#include "swingup/roa.hpp"

namespace swingup {

/// Swing-up success: end-effector height >= height_frac·(l1 + l2) and
/// cost-to-go <= rho, held jointly over the final t_hold seconds.
struct SuccessCriteria {
  double height_frac = 0.9;
  double t_hold = 2.0;
  ModelParams params;  // link lengths for the height test
  RoaEstimate roa;
};

/// Normalization constants for the RealAI-style score. Defaults are twice the
/// published pendubot swing-up figures.
struct ScoreReferences {
  double swingup_time = 1.3;
  double energy = 18.8;
  double integrated_torque = 4.42;
  double torque_cost = 17.16;
  double torque_smoothness = 0.344;
  double velocity_cost = 89.96;
};

struct MetricsReport {
  bool success = false;
  double swingup_time = 0.0;       // s
  double energy = 0.0;             // J
  double max_torque = 0.0;         // N·m
  double integrated_torque = 0.0;  // N·m·s
  double torque_cost = 0.0;        // N²·m²·s
  double torque_smoothness = 0.0;  // N·m
  double velocity_cost = 0.0;      // rad²/s
  double score = 0.0;              // RealAI-style, in [0, 1]
};

/// Torque metrics use the applied torque. Sums are Riemann sums over the
/// recorded rows (each row spans one dt). Throws ConfigError on an empty
/// trajectory or a non-uniform time grid.
MetricsReport compute_metrics(const Trajectory& traj, const SuccessCriteria& criteria,
                              const ScoreReferences& refs = {});

nlohmann::ordered_json metrics_to_json(const MetricsReport& m);

enum class PerturbationKind {
  MeasurementNoise,
  TorqueNoise,
  TorqueResponse,
  TimeDelay,
  ModelInaccuracy,
};

inline constexpr PerturbationKind kAllPerturbationKinds[] = {
    PerturbationKind::MeasurementNoise, PerturbationKind::TorqueNoise,
    PerturbationKind::TorqueResponse, PerturbationKind::TimeDelay,
    PerturbationKind::ModelInaccuracy};

std::string to_string(PerturbationKind k);
PerturbationKind perturbation_kind_from_string(const std::string& s);

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::MeasurementNoise;
  std::vector<double> levels;
  std::uint64_t seed = 0;

  /// Levels non-negative and strictly increasing, within each kind's range.
  void validate() const;

  /// Ten evenly spaced levels per kind.
  static PerturbationSpec defaults(PerturbationKind kind, std::uint64_t seed = 0);
};

/// The controller sees x + N(0, σ²) on every component; the plant keeps the
/// true state.
ControlLaw wrap_measurement_noise(ControlLaw inner, double sigma, std::uint64_t seed);

/// Applied torque = commanded + N(0, σ²) per joint.
ActuatorModel wrap_torque_noise(double sigma, std::uint64_t seed);

/// First-order response τ_app = (1 - k)·τ_prev + k·τ_cmd, k in (0, 2].
ActuatorModel wrap_torque_response(double k_resp);

/// The controller sees the state from n control steps ago; zero state before
/// the first n steps.
ControlLaw wrap_time_delay(ControlLaw inner, int n);

/// Plant parameters {m, l, r, I, b} scaled by independent Uniform[1-eps, 1+eps]
/// factors, eps in [0, 0.5]. COM distances are clamped to their link length.
ModelParams wrap_model_inaccuracy(const ModelParams& nominal, double eps, std::uint64_t seed);

struct KindResult {
  PerturbationKind kind;
  std::vector<double> levels;
  std::vector<bool> success;
  double fraction = 0.0;
};

struct RobustnessReport {
  std::vector<KindResult> kinds;
  double overall = 0.0;

  double fraction(PerturbationKind k) const;
};

struct RobustnessSetup {
  State x0{};
  double horizon_s = 10.0;
  double dt = 0.002;
  SuccessCriteria criteria;
  ScoreReferences refs;
  int threads = 1;
};

/// Builds a fresh controller per rollout.
using ControllerFactory = std::function<ControlLaw()>;

/// One rollout per level; per-kind score is the fraction of successful
/// levels and the overall score is their mean. Level seeds derive from the
/// spec seed and level index, so parallel and sequential runs agree.
RobustnessReport robustness_suite(const ControllerFactory& factory, const ModelParams& params,
                                  const std::vector<PerturbationSpec>& specs,
                                  const RobustnessSetup& setup);

nlohmann::ordered_json robustness_to_json(const RobustnessReport& r);
/// Rows `kind,level,success`.
void write_robustness_levels_csv(std::ostream& os, const RobustnessReport& r);
/// Rows `kind,score` followed by `overall,<score>`.
void write_robustness_summary_csv(std::ostream& os, const RobustnessReport& r);

}  // namespace swingup
