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

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "swingup/dynamics.hpp"
#include "swingup/lqr.hpp"
#include "swingup/mlp.hpp"
#include "swingup/roa.hpp"
#include "swingup/types.hpp"

namespace swingup {

enum class ControllerTag { Sac, Lqr };

std::string to_string(ControllerTag t);

struct Command {
  Torque torque = Torque::Zero();
  ControllerTag tag = ControllerTag::Sac;
};

/// Maps a (possibly perturbed) measured state to a torque command.
using ControlLaw = std::function<Command(const State&)>;

/// Maps a commanded torque to the torque the plant receives.
using ActuatorModel = std::function<Torque(const Torque&)>;

/// SAC policy mean for swing-up; LQR whenever the state is inside the
/// estimated RoA. Stateless and immutable after construction.
class HybridController {
 public:
  HybridController(Mlp policy, LqrDesign design, RoaEstimate roa,
                   double v_max = 20.0, double tau_max = 5.0,
                   double dt_control = 0.002);

  Command control(const State& x) const;
  Command operator()(const State& x) const { return control(x); }

  double dt_control() const { return dt_control_; }
  const LqrDesign& design() const { return design_; }
  const RoaEstimate& roa() const { return roa_; }
  const Mlp& policy() const { return policy_; }

 private:
  Mlp policy_;
  LqrDesign design_;
  RoaEstimate roa_;
  double v_max_;
  double tau_max_;
  double dt_control_;
};

struct Trajectory {
  double dt = 0.0;
  std::vector<double> t;
  std::vector<State> x;
  std::vector<Torque> commanded;
  std::vector<Torque> applied;
  std::vector<ControllerTag> tag;
  bool diverged = false;
  std::string diagnostic;

  std::size_t size() const { return t.size(); }
  bool empty() const { return t.empty(); }
  void push(double time, const State& s, const Torque& cmd, const Torque& app, ControllerTag tg);
};

/// Closed-loop simulation at `dt` with zero-order-hold torque for
/// round(horizon_s / dt) steps. Each row holds the state at the start of the
/// step and the torque held during it. The applied torque is the actuator
/// output clipped to ±tau_max with non-actuated joints zeroed. A non-finite
/// state stops the rollout, sets `diverged` and keeps the partial record.
Trajectory rollout(const ControlLaw& controller, const ModelParams& plant,
                   const State& x0, double horizon_s, double dt,
                   const ActuatorModel& actuator = {});

Trajectory rollout(const HybridController& controller, const ModelParams& plant,
                   const State& x0, double horizon_s);

/// Header `t,p1,p2,v1,v2,tau1_cmd,tau2_cmd,tau1_app,tau2_app,ctrl`, values
/// printed with 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// Throws IoError on a malformed file.
Trajectory read_trajectory_csv(std::istream& is);

inline constexpr const char* kTrajectoryHeader =
    "t,p1,p2,v1,v2,tau1_cmd,tau2_cmd,tau1_app,tau2_app,ctrl";

}  // namespace swingup
