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

#include "swingup/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include "swingup/errors.hpp"

namespace swingup {

MetricsReport compute_metrics(const Trajectory& traj, const SuccessCriteria& criteria,
                              const ScoreReferences& refs) {
  if (traj.empty()) throw ConfigError("cannot score an empty trajectory");
  const std::size_t n = traj.size();
  const double dt = traj.dt;
  if (!(dt > 0.0)) throw ConfigError("trajectory time step must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = traj.t[0] + static_cast<double>(i) * dt;
    if (std::abs(traj.t[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
      throw ConfigError("trajectory time grid is not uniform at row " + std::to_string(i));
  }

  const double h_goal = criteria.height_frac * (criteria.params.l1 + criteria.params.l2);
  auto holds = [&](std::size_t i) {
    const State& s = traj.x[i];
    return end_effector_height(s.p1, s.p2, criteria.params) >= h_goal &&
           in_roa(s, criteria.roa);
  };
  std::size_t first = n;  // start of the terminal run where the condition holds
  while (first > 0 && holds(first - 1)) --first;
  const double held = static_cast<double>(n - first) * dt;

  MetricsReport m;
  m.success = !traj.diverged && first < n && held >= criteria.t_hold - 1e-9;
  m.swingup_time = first < n ? traj.t[first] - traj.t[0] : static_cast<double>(n) * dt;

  double power = 0.0, abs_tau = 0.0, sq_tau = 0.0, sq_vel = 0.0, sq_diff = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Torque& tau = traj.applied[i];
    const State& s = traj.x[i];
    power += std::abs(tau[0] * s.v1 + tau[1] * s.v2);
    abs_tau += std::abs(tau[0]) + std::abs(tau[1]);
    sq_tau += tau.squaredNorm();
    sq_vel += s.v1 * s.v1 + s.v2 * s.v2;
    m.max_torque = std::max(m.max_torque, tau.cwiseAbs().maxCoeff());
    if (i + 1 < n) sq_diff += (traj.applied[i + 1] - tau).squaredNorm();
  }
  m.energy = power * dt;
  m.integrated_torque = abs_tau * dt;
  m.torque_cost = sq_tau * dt;
  m.velocity_cost = sq_vel * dt;
  m.torque_smoothness = n > 1 ? std::sqrt(sq_diff / static_cast<double>(n - 1)) : 0.0;

  if (m.success) {
    auto part = [](double value, double ref) { return std::max(0.0, 1.0 - value / ref); };
    m.score = (part(m.swingup_time, refs.swingup_time) + part(m.energy, refs.energy) +
               part(m.integrated_torque, refs.integrated_torque) +
               part(m.torque_cost, refs.torque_cost) +
               part(m.torque_smoothness, refs.torque_smoothness) +
               part(m.velocity_cost, refs.velocity_cost)) /
              6.0;
  }
  return m;
}

nlohmann::ordered_json metrics_to_json(const MetricsReport& m) {
  nlohmann::ordered_json j;
  j["success"] = m.success;
  j["swingup_time"] = m.swingup_time;
  j["energy"] = m.energy;
  j["max_torque"] = m.max_torque;
  j["integrated_torque"] = m.integrated_torque;
  j["torque_cost"] = m.torque_cost;
  j["torque_smoothness"] = m.torque_smoothness;
  j["velocity_cost"] = m.velocity_cost;
  j["score"] = m.score;
  return j;
}

std::string to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::MeasurementNoise: return "measurement_noise";
    case PerturbationKind::TorqueNoise: return "torque_noise";
    case PerturbationKind::TorqueResponse: return "torque_response";
    case PerturbationKind::TimeDelay: return "time_delay";
    case PerturbationKind::ModelInaccuracy: return "model_inaccuracy";
  }
  return "?";
}

PerturbationKind perturbation_kind_from_string(const std::string& s) {
  for (PerturbationKind k : kAllPerturbationKinds)
    if (to_string(k) == s) return k;
  throw ConfigError("unknown perturbation kind '" + s + "'");
}

void PerturbationSpec::validate() const {
  const std::string name = to_string(kind);
  if (levels.empty()) throw ConfigError(name + ": level schedule is empty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double v = levels[i];
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(name + ": levels must be finite and >= 0");
    if (i > 0 && !(v > levels[i - 1])) throw ConfigError(name + ": levels must be strictly increasing");
    if (kind == PerturbationKind::TorqueResponse && !(v > 0.0 && v <= 2.0))
      throw ConfigError(name + ": k_resp must lie in (0, 2]");
    if (kind == PerturbationKind::ModelInaccuracy && v > 0.5)
      throw ConfigError(name + ": eps must lie in [0, 0.5]");
    if (kind == PerturbationKind::TimeDelay && v != std::round(v))
      throw ConfigError(name + ": delays are whole control steps");
  }
}

PerturbationSpec PerturbationSpec::defaults(PerturbationKind kind, std::uint64_t seed) {
  PerturbationSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  for (int i = 0; i < 10; ++i) {
    const double x = static_cast<double>(i);
    switch (kind) {
      case PerturbationKind::MeasurementNoise: spec.levels.push_back(0.005 * x); break;
      case PerturbationKind::TorqueNoise: spec.levels.push_back(0.1 * x); break;
      case PerturbationKind::TorqueResponse: spec.levels.push_back(0.2 * (x + 1.0)); break;
      case PerturbationKind::TimeDelay: spec.levels.push_back(2.0 * x); break;
      case PerturbationKind::ModelInaccuracy: spec.levels.push_back(0.05 * x); break;
    }
  }
  return spec;
}

ControlLaw wrap_measurement_noise(ControlLaw inner, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ConfigError("measurement noise level must be >= 0");
  if (sigma == 0.0) return inner;
  auto rng = std::make_shared<Rng>(seed);
  return [inner = std::move(inner), rng, sigma](const State& x) {
    const State noisy{x.p1 + sigma * rng->normal(), x.p2 + sigma * rng->normal(),
                      x.v1 + sigma * rng->normal(), x.v2 + sigma * rng->normal()};
    return inner(noisy);
  };
}

ActuatorModel wrap_torque_noise(double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ConfigError("torque noise level must be >= 0");
  if (sigma == 0.0) return [](const Torque& cmd) { return cmd; };
  auto rng = std::make_shared<Rng>(seed);
  return [rng, sigma](const Torque& cmd) {
    const double n1 = rng->normal();
    const double n2 = rng->normal();
    return Torque(cmd[0] + sigma * n1, cmd[1] + sigma * n2);
  };
}

ActuatorModel wrap_torque_response(double k_resp) {
  if (!(k_resp > 0.0 && k_resp <= 2.0)) throw ConfigError("torque response k_resp must lie in (0, 2]");
  if (k_resp == 1.0) return [](const Torque& cmd) { return cmd; };
  auto prev = std::make_shared<Torque>(Torque::Zero());
  return [prev, k_resp](const Torque& cmd) {
    const Torque app = (1.0 - k_resp) * *prev + k_resp * cmd;
    *prev = app;
    return app;
  };
}

ControlLaw wrap_time_delay(ControlLaw inner, int n) {
  if (n < 0) throw ConfigError("time delay must be >= 0 steps");
  if (n == 0) return inner;
  auto history = std::make_shared<std::deque<State>>(static_cast<std::size_t>(n), State{});
  return [inner = std::move(inner), history](const State& x) {
    history->push_back(x);
    const State delayed = history->front();
    history->pop_front();
    return inner(delayed);
  };
}

ModelParams wrap_model_inaccuracy(const ModelParams& nominal, double eps, std::uint64_t seed) {
  if (!(eps >= 0.0 && eps <= 0.5)) throw ConfigError("model inaccuracy eps must lie in [0, 0.5]");
  if (eps == 0.0) return nominal;
  Rng rng(seed);
  ModelParams p = nominal;
  for (double* v : {&p.m1, &p.m2, &p.l1, &p.l2, &p.r1, &p.r2, &p.I1, &p.I2, &p.b1, &p.b2})
    *v *= rng.uniform(1.0 - eps, 1.0 + eps);
  p.r1 = std::min(p.r1, p.l1);
  p.r2 = std::min(p.r2, p.l2);
  return p;
}

double RobustnessReport::fraction(PerturbationKind k) const {
  for (const KindResult& r : kinds)
    if (r.kind == k) return r.fraction;
  throw std::out_of_range("perturbation kind not in report");
}

namespace {

bool run_level(const ControllerFactory& factory, const ModelParams& params,
               const PerturbationSpec& spec, std::size_t index, const RobustnessSetup& setup) {
  const double level = spec.levels[index];
  const std::uint64_t seed = derive_seed(spec.seed, {static_cast<std::uint64_t>(index)});
  ControlLaw law = factory();
  ModelParams plant = params;
  ActuatorModel actuator;
  switch (spec.kind) {
    case PerturbationKind::MeasurementNoise: law = wrap_measurement_noise(std::move(law), level, seed); break;
    case PerturbationKind::TorqueNoise: actuator = wrap_torque_noise(level, seed); break;
    case PerturbationKind::TorqueResponse: actuator = wrap_torque_response(level); break;
    case PerturbationKind::TimeDelay: law = wrap_time_delay(std::move(law), static_cast<int>(std::lround(level))); break;
    case PerturbationKind::ModelInaccuracy: plant = wrap_model_inaccuracy(params, level, seed); break;
  }
  const Trajectory traj = rollout(law, plant, setup.x0, setup.horizon_s, setup.dt, actuator);
  return compute_metrics(traj, setup.criteria, setup.refs).success;
}

}  // namespace

RobustnessReport robustness_suite(const ControllerFactory& factory, const ModelParams& params,
                                  const std::vector<PerturbationSpec>& specs,
                                  const RobustnessSetup& setup) {
  for (PerturbationKind k : kAllPerturbationKinds) {
    const bool covered = std::any_of(specs.begin(), specs.end(),
                                     [k](const PerturbationSpec& s) { return s.kind == k; });
    if (!covered) throw ConfigError("robustness specs do not cover kind '" + to_string(k) + "'");
  }
  for (const PerturbationSpec& s : specs) s.validate();

  // Flatten (spec, level) jobs so levels can run in any order.
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t s = 0; s < specs.size(); ++s)
    for (std::size_t l = 0; l < specs[s].levels.size(); ++l) jobs.emplace_back(s, l);
  std::vector<char> ok(jobs.size(), 0);
  auto run = [&](std::size_t j) {
    ok[j] = run_level(factory, params, specs[jobs[j].first], jobs[j].second, setup) ? 1 : 0;
  };
  if (setup.threads <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < setup.threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) run(j);
      });
    for (auto& th : pool) th.join();
  }

  RobustnessReport report;
  std::size_t j = 0;
  for (const PerturbationSpec& s : specs) {
    KindResult kr{s.kind, s.levels, {}, 0.0};
    int wins = 0;
    for (std::size_t l = 0; l < s.levels.size(); ++l, ++j) {
      kr.success.push_back(ok[j] != 0);
      wins += ok[j];
    }
    kr.fraction = static_cast<double>(wins) / static_cast<double>(s.levels.size());
    report.kinds.push_back(std::move(kr));
  }
  double sum = 0.0;
  for (const KindResult& kr : report.kinds) sum += kr.fraction;
  report.overall = sum / static_cast<double>(report.kinds.size());
  return report;
}

nlohmann::ordered_json robustness_to_json(const RobustnessReport& r) {
  nlohmann::ordered_json j;
  for (const KindResult& k : r.kinds) j[to_string(k.kind)] = k.fraction;
  j["overall"] = r.overall;
  return j;
}

void write_robustness_levels_csv(std::ostream& os, const RobustnessReport& r) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "kind,level,success\n";
  for (const KindResult& k : r.kinds)
    for (std::size_t i = 0; i < k.levels.size(); ++i)
      buf << to_string(k.kind) << ',' << k.levels[i] << ',' << (k.success[i] ? 1 : 0) << '\n';
  os << buf.str();
}

void write_robustness_summary_csv(std::ostream& os, const RobustnessReport& r) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "kind,score\n";
  for (const KindResult& k : r.kinds) buf << to_string(k.kind) << ',' << k.fraction << '\n';
  buf << "overall," << r.overall << '\n';
  os << buf.str();
}

}  // namespace swingup
