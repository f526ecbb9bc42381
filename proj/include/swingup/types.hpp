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

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

namespace swingup {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

/// Joint torques (shoulder, elbow) in N·m.
using Torque = Eigen::Vector2d;

/// Double-pendulum state. Angles are measured from the hanging-down
/// configuration, counterclockwise positive, and are not wrapped.
struct State {
  double p1 = 0.0;
  double p2 = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;

  Vec4 vec() const { return {p1, p2, v1, v2}; }
  Vec2 q() const { return {p1, p2}; }
  Vec2 qd() const { return {v1, v2}; }

  static State from(const Vec4& x) { return {x[0], x[1], x[2], x[3]}; }

  bool finite() const {
    return std::isfinite(p1) && std::isfinite(p2) && std::isfinite(v1) &&
           std::isfinite(v2);
  }

  friend bool operator==(const State&, const State&) = default;
};

struct Accel {
  double a1 = 0.0;
  double a2 = 0.0;

  Vec2 vec() const { return {a1, a2}; }
  bool finite() const { return std::isfinite(a1) && std::isfinite(a2); }
};

enum class Actuation { Pendubot, Acrobot, Full };

/// Upright equilibrium (π, 0, 0, 0).
inline State upright_goal() { return {M_PI, 0.0, 0.0, 0.0}; }

}  // namespace swingup
