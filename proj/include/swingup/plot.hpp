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

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "swingup/hybrid.hpp"

namespace swingup {

/// Stacked panels of joint angles, velocities and applied torques over time,
/// with a band at the bottom marking which controller was active.
/// Throws ConfigError on an empty trajectory.
void write_timeseries_svg(std::ostream& os, const Trajectory& traj, const std::string& title);

/// One bar per (label, value in [0, 1]).
void write_bar_chart_svg(std::ostream& os, const std::vector<std::pair<std::string, double>>& bars,
                         const std::string& title);

/// Reads `kind,score` rows as written by the robustness summary table.
std::vector<std::pair<std::string, double>> read_score_table(std::istream& is);

}  // namespace swingup
