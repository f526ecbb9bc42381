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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "swingup/mlp.hpp"
#include "swingup/replay_buffer.hpp"
#include "swingup/rng.hpp"

namespace swingup {

class SwingupEnv;

struct SacConfig {
  double gamma = 0.99;
  double alpha = 0.02;
  double polyak = 0.005;
  double lr = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  // Learner sees c·r with temperature c·α: the same objective scaled by c.
  double reward_scale = 1.0;
  std::uint64_t batch_size = 256;
  std::vector<int> hidden = {256, 256};
  std::uint64_t warmup_steps = 10000;
  std::uint64_t update_every = 1;
  std::uint64_t buffer_capacity = 1000000;
  std::uint64_t seed = 0;

  void validate() const;
  AdamOptions adam() const { return {lr, adam_beta1, adam_beta2, adam_eps}; }

  friend bool operator==(const SacConfig&, const SacConfig&) = default;
};

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kSquashEps = 1e-6;

/// Squashed-Gaussian policy and twin critics with target copies.
struct SacAgent {
  SacConfig config;
  Mlp policy;   // obs -> [mean (k), log_std (k)]
  Mlp q1, q2;   // [obs, action] -> scalar
  Mlp q1_target, q2_target;
  AdamState policy_opt, q1_opt, q2_opt;

  SacAgent() = default;
  /// Initializes all networks from config.seed; targets copy the critics.
  SacAgent(int obs_dim, int action_dim, const SacConfig& config);

  int obs_dim() const { return policy.input_size(); }
  int action_dim() const { return policy.output_size() / 2; }

  friend bool operator==(const SacAgent&, const SacAgent&) = default;
};

/// Reparameterized squashed-Gaussian samples for a batch (columns).
struct SquashedSample {
  Eigen::MatrixXd action;     // k x N, tanh(mean + std·noise)
  Eigen::VectorXd log_prob;   // N
  Eigen::MatrixXd mean;       // k x N
  Eigen::MatrixXd log_std;    // k x N (after clamping)
  Eigen::MatrixXd raw_log_std;
};

SquashedSample squash_sample(const Mlp& policy, const Eigen::MatrixXd& obs,
                             const Eigen::MatrixXd& noise, Mlp::Tape* tape = nullptr);

struct ActionSample {
  Eigen::VectorXd action;
  double log_prob = 0.0;
};

/// a = tanh(μ(s) + σ(s)ξ), ξ ~ N(0, I); log π includes the tanh correction.
ActionSample policy_sample(const SacAgent& agent, const Eigen::Vector4d& s, Rng& rng);

/// Deterministic action tanh(μ(s)).
Eigen::VectorXd policy_mean(const Mlp& policy, const Eigen::Vector4d& s);

/// min_j Q_j([s; a]) per column.
Eigen::VectorXd min_q(const Mlp& qa, const Mlp& qb, const Eigen::MatrixXd& s,
                      const Eigen::MatrixXd& a);

/// y = r + γ(1 - d)(min_j Q_targ,j(s', ã') - α log π(ã'|s')), ã' from `noise`.
Eigen::VectorXd td_targets(const SacAgent& agent, const Batch& batch,
                           const Eigen::MatrixXd& next_noise, const SacConfig& cfg);

/// Single-transition TD target with a freshly sampled ã'. Terminal
/// transitions return r without touching the networks or the generator.
double td_target(const SacAgent& agent, double r, const Eigen::Vector4d& s_next,
                 bool done, const SacConfig& cfg, Rng& rng);

/// Sum over both critics of mean((Q_i(s,a) - y)²); y is held constant.
/// Gradients (sized to each critic) are written when non-null.
double critic_loss(const SacAgent& agent, const Batch& batch,
                   const Eigen::VectorXd& targets, Eigen::VectorXd* grad_q1,
                   Eigen::VectorXd* grad_q2);

/// mean(α log π(ã|s) - min_j Q_j(s, ã)) with reparameterized ã; gradient with
/// respect to the policy parameters only.
double policy_loss(const SacAgent& agent, const Eigen::MatrixXd& obs,
                   const Eigen::MatrixXd& noise, const SacConfig& cfg,
                   Eigen::VectorXd* grad_policy);

struct UpdateLosses {
  double q_loss = 0.0;
  double pi_loss = 0.0;
};

/// One critic step, one policy step (against the updated critics), then the
/// polyak target update. Throws NumericalError on a non-finite loss.
UpdateLosses update(SacAgent& agent, const Batch& batch, const SacConfig& cfg, Rng& rng);

/// Monte-Carlo entropy estimate mean(-log p) over samples.
double entropy(std::span<const double> log_probs);

struct EpisodeRecord {
  std::uint64_t step = 0;     // global step at which the episode ended
  std::uint64_t episode = 0;  // 1-based
  double ret = 0.0;
  std::uint64_t length = 0;
  double q_loss = 0.0;        // mean over updates during the episode (0 if none)
  double pi_loss = 0.0;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

struct TrainingLog {
  std::vector<EpisodeRecord> episodes;
  friend bool operator==(const TrainingLog&, const TrainingLog&) = default;
};

/// Everything the off-policy loop carries between steps besides the agent
/// and environment, so training can be checkpointed and resumed bitwise.
struct TrainingProgress {
  std::uint64_t total_steps = 0;
  std::uint64_t episodes = 0;
  std::uint64_t episode_steps = 0;
  double episode_return = 0.0;
  double episode_q_loss = 0.0;
  double episode_pi_loss = 0.0;
  std::uint64_t episode_updates = 0;
  bool episode_active = false;
  Eigen::Vector4d obs = Eigen::Vector4d::Zero();
};

class TrainingSession {
 public:
  TrainingSession(SwingupEnv& env, SacAgent& agent);

  /// Runs `steps` environment steps and returns the episodes completed in
  /// this call.
  TrainingLog run(std::uint64_t steps);

  const TrainingProgress& progress() const { return progress_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const Rng& rng() const { return rng_; }

  /// Replaces the loop state (checkpoint resume). The environment state is
  /// restored separately on the environment itself.
  void restore(const TrainingProgress& progress, ReplayBuffer buffer, Rng rng);

 private:
  SwingupEnv& env_;
  SacAgent& agent_;
  ReplayBuffer buffer_;
  Rng rng_;
  TrainingProgress progress_;
};

/// Fresh session: uniform random actions for warmup_steps, then policy
/// samples with one update per step (update_every updates every
/// update_every steps). Deterministic for a fixed seed.
TrainingLog train(SwingupEnv& env, SacAgent& agent, const SacConfig& cfg,
                  std::uint64_t steps);

}  // namespace swingup
