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
#include <optional>
#include <string>

#include "swingup/roa.hpp"
#include "swingup/sac.hpp"

namespace swingup {

inline constexpr char kCheckpointMagic[8] = {'S', 'A', 'C', 'P', 'E', 'N', 'D', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Loop state needed to resume training bitwise.
struct SessionSnapshot {
  TrainingProgress progress;
  State env_state;
  int env_steps = 0;
  std::string rng_state;
  std::size_t buffer_head = 0;
  std::vector<Transition> buffer;  // oldest first
};

struct Checkpoint {
  SacAgent agent;
  std::optional<RoaEstimate> roa;
  std::optional<SessionSnapshot> session;
};

/// Little-endian binary layout:
///
///   "SACPEND1"                      8 bytes
///   version                         u32 (= 1)
///   network count                   u32 (= 5: policy, q1, q2, q1_target, q2_target)
///   per network                     u32 layer count L, then L+1 u32 widths
///   per network, same order         per layer: W (out x in, row-major) then b, f64
///   Adam state for policy, q1, q2   u64 step, m[n] f64, v[n] f64
///   SacConfig                       f64 gamma, alpha, polyak, lr, adam_beta1,
///                                   adam_beta2, adam_eps, reward_scale; u64 batch_size,
///                                   warmup_steps, update_every,
///                                   buffer_capacity, seed
///   has_roa                         u8; if 1: f64 S[16] row-major, f64 rho, f64 goal[4]
///   has_session                     u8; if 1: u64 total_steps, episodes,
///                                   episode_steps; f64 episode_return,
///                                   episode_q_loss, episode_pi_loss; u64
///                                   episode_updates; u8 episode_active; f64
///                                   obs[4]; f64 env_state[4]; u64 env_steps;
///                                   u32 length + generator state bytes; u64
///                                   buffer capacity, head, size; then per
///                                   transition f64 s[4], a[k], r, s_next[4], u8 done
void write_checkpoint(std::ostream& os, const Checkpoint& ckpt);

/// Throws IoError on wrong magic, unsupported version, or truncation.
Checkpoint read_checkpoint(std::istream& is);

/// Write-then-rename so a failed write never leaves a partial file.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

class SwingupEnv;
SessionSnapshot snapshot_session(const TrainingSession& session, const SwingupEnv& env);
/// Restores the session loop state and the environment episode position.
void restore_session(TrainingSession& session, SwingupEnv& env, const SessionSnapshot& snap,
                     int action_dim);

}  // namespace swingup
