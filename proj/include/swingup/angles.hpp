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

#include "swingup/types.hpp"

namespace swingup {

/// Maps an angle into (-π, π].
inline double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * M_PI);
  if (r <= -M_PI) r += 2.0 * M_PI;
  return r;
}

/// State error with both joint-angle differences wrapped into (-π, π].
inline Vec4 wrapped_error(const State& x, const State& goal) {
  return {wrap_angle(x.p1 - goal.p1), wrap_angle(x.p2 - goal.p2),
          x.v1 - goal.v1, x.v2 - goal.v2};
}

}  // namespace swingup
