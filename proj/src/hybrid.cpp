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

#include "swingup/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "swingup/env.hpp"
#include "swingup/errors.hpp"
#include "swingup/sac.hpp"

namespace swingup {

std::string to_string(ControllerTag t) { return t == ControllerTag::Lqr ? "LQR" : "SAC"; }

HybridController::HybridController(Mlp policy, LqrDesign design, RoaEstimate roa,
                                   double v_max, double tau_max, double dt_control)
    : policy_(std::move(policy)),
      design_(std::move(design)),
      roa_(roa),
      v_max_(v_max),
      tau_max_(tau_max),
      dt_control_(dt_control) {
  if (!(dt_control_ > 0.0)) throw ConfigError("control period must be positive");
  if (roa_.S != design_.S) throw ConfigError("RoA cost-to-go matrix differs from the LQR design");
  if (policy_.input_size() != 4 || policy_.output_size() != 2 * design_.K.rows())
    throw ConfigError("policy network dimensions do not match the plant");
}

Command HybridController::control(const State& x) const {
  if (in_roa(x, roa_)) return {lqr_control(x, design_, tau_max_), ControllerTag::Lqr};
  const Eigen::VectorXd a = policy_mean(policy_, normalize_state(x, v_max_));
  return {scale_action(a, tau_max_, design_.actuation), ControllerTag::Sac};
}

void Trajectory::push(double time, const State& s, const Torque& cmd, const Torque& app,
                      ControllerTag tg) {
  t.push_back(time);
  x.push_back(s);
  commanded.push_back(cmd);
  applied.push_back(app);
  tag.push_back(tg);
}

Trajectory rollout(const ControlLaw& controller, const ModelParams& plant,
                   const State& x0, double horizon_s, double dt,
                   const ActuatorModel& actuator) {
  if (!(horizon_s > 0.0)) throw ConfigError("rollout horizon must be positive");
  if (!(dt > 0.0)) throw ConfigError("rollout step must be positive");
  const long steps = std::max(1L, std::lround(horizon_s / dt));
  Trajectory traj;
  traj.dt = dt;
  State x = x0;
  for (long k = 0; k < steps; ++k) {
    const Command cmd = controller(x);
    Torque app = actuator ? actuator(cmd.torque) : cmd.torque;
    app = plant.mask(app.cwiseMax(-plant.tau_max).cwiseMin(plant.tau_max));
    traj.push(static_cast<double>(k) * dt, x, cmd.torque, app, cmd.tag);
    try {
      x = step_rk4(x, app, dt, plant);
    } catch (const NumericalError& e) {
      traj.diverged = true;
      traj.diagnostic = e.what();
      break;
    }
  }
  return traj;
}

Trajectory rollout(const HybridController& controller, const ModelParams& plant,
                   const State& x0, double horizon_s) {
  return rollout([&controller](const State& x) { return controller.control(x); },
                 plant, x0, horizon_s, controller.dt_control());
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  std::ostringstream buf;
  buf.precision(17);
  buf << kTrajectoryHeader << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const State& s = traj.x[i];
    buf << traj.t[i] << ',' << s.p1 << ',' << s.p2 << ',' << s.v1 << ',' << s.v2 << ','
        << traj.commanded[i][0] << ',' << traj.commanded[i][1] << ',' << traj.applied[i][0]
        << ',' << traj.applied[i][1] << ',' << to_string(traj.tag[i]) << '\n';
  }
  os << buf.str();
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTrajectoryHeader)
    throw IoError("trajectory CSV must start with header '" + std::string(kTrajectoryHeader) + "'");
  Trajectory traj;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 10) throw IoError("trajectory CSV row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " columns");
    double v[9];
    for (int i = 0; i < 9; ++i) {
      std::size_t used = 0;
      try {
        v[i] = std::stod(cells[i], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cells[i].size() || cells[i].empty())
        throw IoError("trajectory CSV row " + std::to_string(row) + ": bad number '" + cells[i] + "'");
    }
    ControllerTag tag;
    if (cells[9] == "SAC") tag = ControllerTag::Sac;
    else if (cells[9] == "LQR") tag = ControllerTag::Lqr;
    else throw IoError("trajectory CSV row " + std::to_string(row) + ": unknown controller '" + cells[9] + "'");
    traj.push(v[0], {v[1], v[2], v[3], v[4]}, {v[5], v[6]}, {v[7], v[8]}, tag);
  }
  if (traj.size() >= 2) traj.dt = traj.t[1] - traj.t[0];
  return traj;
}

}  // namespace swingup
