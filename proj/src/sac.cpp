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

#include "swingup/sac.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "swingup/env.hpp"
#include "swingup/errors.hpp"

namespace swingup {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // ½ log(2π)
constexpr std::uint64_t kInitTag = 1;
constexpr std::uint64_t kSessionTag = 2;

MatrixXd stack(const MatrixXd& top, const MatrixXd& bottom) {
  MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  MatrixXd z(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) z(i, j) = rng.normal();
  return z;
}

}  // namespace

void SacConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("sac.gamma must lie in [0, 1)");
  if (!(alpha > 0.0)) throw ConfigError("sac.alpha must be positive");
  if (!(polyak > 0.0 && polyak < 1.0)) throw ConfigError("sac.polyak must lie in (0, 1)");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("sac.lr must be finite and >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw ConfigError("sac Adam betas must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("sac.adam_eps must be positive");
  if (!(reward_scale > 0.0) || !std::isfinite(reward_scale)) throw ConfigError("sac.reward_scale must be positive");
  if (batch_size == 0) throw ConfigError("sac.batch_size must be positive");
  if (hidden.empty()) throw ConfigError("sac.hidden must list at least one width");
  for (int w : hidden)
    if (w <= 0) throw ConfigError("sac.hidden widths must be positive");
  if (update_every == 0) throw ConfigError("sac.update_every must be positive");
  if (buffer_capacity == 0) throw ConfigError("sac.buffer_capacity must be positive");
}

SacAgent::SacAgent(int obs_dim, int action_dim, const SacConfig& cfg) : config(cfg) {
  cfg.validate();
  std::vector<int> pw{obs_dim};
  std::vector<int> qw{obs_dim + action_dim};
  for (int h : cfg.hidden) {
    pw.push_back(h);
    qw.push_back(h);
  }
  pw.push_back(2 * action_dim);
  qw.push_back(1);
  policy = Mlp(pw);
  q1 = Mlp(qw);
  q2 = Mlp(qw);
  Rng rng(derive_seed(cfg.seed, {kInitTag}));
  policy.init(rng);
  q1.init(rng);
  q2.init(rng);
  q1_target = q1;
  q2_target = q2;
  policy_opt = AdamState(policy.num_params());
  q1_opt = AdamState(q1.num_params());
  q2_opt = AdamState(q2.num_params());
}

SquashedSample squash_sample(const Mlp& policy, const MatrixXd& obs,
                             const MatrixXd& noise, Mlp::Tape* tape) {
  const MatrixXd out = tape ? policy.forward(obs, *tape) : policy.forward(obs);
  const Eigen::Index k = out.rows() / 2;
  SquashedSample s;
  s.mean = out.topRows(k);
  s.raw_log_std = out.bottomRows(k);
  s.log_std = s.raw_log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  const MatrixXd pre = s.mean + (s.log_std.array().exp() * noise.array()).matrix();
  s.action = pre.array().tanh().matrix();
  s.log_prob = (-0.5 * noise.array().square() - s.log_std.array() - kHalfLog2Pi)
                   .colwise()
                   .sum()
                   .transpose()
                   .matrix();
  s.log_prob -= (1.0 - s.action.array().square() + kSquashEps).log().colwise().sum().transpose().matrix();
  return s;
}

ActionSample policy_sample(const SacAgent& agent, const Eigen::Vector4d& s, Rng& rng) {
  const MatrixXd noise = gaussian_matrix(agent.action_dim(), 1, rng);
  const SquashedSample out = squash_sample(agent.policy, s, noise);
  return {out.action.col(0), out.log_prob[0]};
}

VectorXd policy_mean(const Mlp& policy, const Eigen::Vector4d& s) {
  const VectorXd out = policy.forward(s);
  return out.head(out.size() / 2).array().tanh().matrix();
}

VectorXd min_q(const Mlp& qa, const Mlp& qb, const MatrixXd& s, const MatrixXd& a) {
  const MatrixXd in = stack(s, a);
  return qa.forward(in).row(0).transpose().cwiseMin(qb.forward(in).row(0).transpose());
}

VectorXd td_targets(const SacAgent& agent, const Batch& batch,
                    const MatrixXd& next_noise, const SacConfig& cfg) {
  const SquashedSample next = squash_sample(agent.policy, batch.s_next, next_noise);
  const VectorXd q_next = min_q(agent.q1_target, agent.q2_target, batch.s_next, next.action);
  const VectorXd soft = q_next - cfg.alpha * next.log_prob;
  return batch.r + cfg.gamma * ((1.0 - batch.done.array()) * soft.array()).matrix();
}

double td_target(const SacAgent& agent, double r, const Eigen::Vector4d& s_next,
                 bool done, const SacConfig& cfg, Rng& rng) {
  if (done) return r;
  const MatrixXd noise = gaussian_matrix(agent.action_dim(), 1, rng);
  const SquashedSample next = squash_sample(agent.policy, s_next, noise);
  const double q = min_q(agent.q1_target, agent.q2_target, s_next, next.action)[0];
  return r + cfg.gamma * (q - cfg.alpha * next.log_prob[0]);
}

double critic_loss(const SacAgent& agent, const Batch& batch, const VectorXd& targets,
                   VectorXd* grad_q1, VectorXd* grad_q2) {
  const MatrixXd in = stack(batch.s, batch.a);
  const double n = static_cast<double>(batch.size());
  double total = 0.0;
  auto one = [&](const Mlp& q, VectorXd* grad) {
    Mlp::Tape tape;
    const VectorXd pred = q.forward(in, tape).row(0).transpose();
    const VectorXd diff = pred - targets;
    total += diff.squaredNorm() / n;
    if (grad != nullptr) {
      *grad = VectorXd::Zero(q.num_params());
      q.backward(tape, (2.0 / n) * diff.transpose(), grad);
    }
  };
  one(agent.q1, grad_q1);
  one(agent.q2, grad_q2);
  return total;
}

double policy_loss(const SacAgent& agent, const MatrixXd& obs, const MatrixXd& noise,
                   const SacConfig& cfg, VectorXd* grad_policy) {
  Mlp::Tape ptape;
  const SquashedSample smp = squash_sample(agent.policy, obs, noise, &ptape);
  const MatrixXd in = stack(obs, smp.action);
  Mlp::Tape t1, t2;
  const VectorXd qa = agent.q1.forward(in, t1).row(0).transpose();
  const VectorXd qb = agent.q2.forward(in, t2).row(0).transpose();
  const Eigen::Index n = obs.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const VectorXd qmin = qa.cwiseMin(qb);
  const double loss = (cfg.alpha * smp.log_prob - qmin).mean();
  if (grad_policy == nullptr) return loss;

  // dL/dQ_min = -1/N routed to whichever critic attains the minimum.
  Eigen::RowVectorXd g1 = Eigen::RowVectorXd::Zero(n);
  Eigen::RowVectorXd g2 = Eigen::RowVectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (qa[j] <= qb[j]) g1[j] = -inv_n;
    else g2[j] = -inv_n;
  }
  const Eigen::Index k = smp.action.rows();
  const MatrixXd dq_da = agent.q1.backward(t1, g1, nullptr).bottomRows(k) +
                         agent.q2.backward(t2, g2, nullptr).bottomRows(k);

  const Eigen::ArrayXXd a = smp.action.array();
  const Eigen::ArrayXXd one_minus = 1.0 - a.square();
  const Eigen::ArrayXXd dlogp_du = 2.0 * a * one_minus / (one_minus + kSquashEps);
  const Eigen::ArrayXXd dL_du = cfg.alpha * inv_n * dlogp_du + dq_da.array() * one_minus;
  const Eigen::ArrayXXd std_dev = smp.log_std.array().exp();
  Eigen::ArrayXXd dL_dlogstd = dL_du * std_dev * noise.array() - cfg.alpha * inv_n;
  const Eigen::ArrayXXd inside =
      ((smp.raw_log_std.array() >= kLogStdMin) && (smp.raw_log_std.array() <= kLogStdMax)).cast<double>();
  dL_dlogstd *= inside;

  MatrixXd grad_out(2 * k, n);
  grad_out << dL_du.matrix(), dL_dlogstd.matrix();
  *grad_policy = VectorXd::Zero(agent.policy.num_params());
  agent.policy.backward(ptape, grad_out, grad_policy);
  return loss;
}

UpdateLosses update(SacAgent& agent, const Batch& batch, const SacConfig& cfg, Rng& rng) {
  if (batch.size() == 0) throw std::invalid_argument("SAC update needs a non-empty batch");
  const Eigen::Index k = agent.action_dim();
  const Eigen::Index n = batch.size();

  const VectorXd y = td_targets(agent, batch, gaussian_matrix(k, n, rng), cfg);
  VectorXd g1, g2;
  UpdateLosses losses;
  losses.q_loss = critic_loss(agent, batch, y, &g1, &g2);
  if (!std::isfinite(losses.q_loss)) {
    std::ostringstream msg;
    msg << "non-finite critic loss (" << losses.q_loss << ") after "
        << agent.q1_opt.step << " critic updates";
    throw NumericalError(msg.str());
  }
  const AdamOptions opt = cfg.adam();
  adam_step(agent.q1.params(), g1, agent.q1_opt, opt);
  adam_step(agent.q2.params(), g2, agent.q2_opt, opt);

  VectorXd gp;
  losses.pi_loss = policy_loss(agent, batch.s, gaussian_matrix(k, n, rng), cfg, &gp);
  if (!std::isfinite(losses.pi_loss)) {
    std::ostringstream msg;
    msg << "non-finite policy loss (" << losses.pi_loss << ") after "
        << agent.policy_opt.step << " policy updates";
    throw NumericalError(msg.str());
  }
  adam_step(agent.policy.params(), gp, agent.policy_opt, opt);

  polyak_update(agent.q1_target, agent.q1, cfg.polyak);
  polyak_update(agent.q2_target, agent.q2, cfg.polyak);
  return losses;
}

double entropy(std::span<const double> log_probs) {
  if (log_probs.empty()) throw std::invalid_argument("entropy needs at least one sample");
  const double sum = std::accumulate(log_probs.begin(), log_probs.end(), 0.0);
  return -sum / static_cast<double>(log_probs.size());
}

TrainingSession::TrainingSession(SwingupEnv& env, SacAgent& agent)
    : env_(env),
      agent_(agent),
      buffer_(agent.config.buffer_capacity, agent.action_dim()),
      rng_(derive_seed(agent.config.seed, {kSessionTag})) {
  if (env.action_dim() != agent.action_dim() || agent.obs_dim() != 4)
    throw ConfigError("environment and agent dimensions disagree");
}

void TrainingSession::restore(const TrainingProgress& progress, ReplayBuffer buffer, Rng rng) {
  progress_ = progress;
  buffer_ = std::move(buffer);
  rng_ = std::move(rng);
}

TrainingLog TrainingSession::run(std::uint64_t steps) {
  const SacConfig& cfg = agent_.config;
  SacConfig learner = cfg;
  learner.alpha *= cfg.reward_scale;
  const int k = agent_.action_dim();
  TrainingLog log;
  TrainingProgress& p = progress_;
  for (std::uint64_t i = 0; i < steps; ++i) {
    if (!p.episode_active) {
      p.obs = env_.reset(rng_);
      p.episode_active = true;
      p.episode_steps = 0;
      p.episode_return = 0.0;
      p.episode_q_loss = 0.0;
      p.episode_pi_loss = 0.0;
      p.episode_updates = 0;
    }
    VectorXd action(k);
    if (p.total_steps < cfg.warmup_steps) {
      for (int j = 0; j < k; ++j) action[j] = rng_.uniform(-1.0, 1.0);
    } else {
      action = policy_sample(agent_, p.obs, rng_).action;
    }
    const StepResult sr = env_.step(action);
    // Episodes end only on the time limit, which is not a terminal state.
    buffer_.push({p.obs, action, cfg.reward_scale * sr.reward, sr.obs, false});
    p.obs = sr.obs;
    p.episode_return += sr.reward;
    ++p.episode_steps;
    ++p.total_steps;

    if (p.total_steps > cfg.warmup_steps && p.total_steps % cfg.update_every == 0) {
      for (std::uint64_t u = 0; u < cfg.update_every; ++u) {
        const UpdateLosses l = update(agent_, buffer_.sample(cfg.batch_size, rng_), learner, rng_);
        p.episode_q_loss += l.q_loss;
        p.episode_pi_loss += l.pi_loss;
        ++p.episode_updates;
      }
    }

    if (sr.done) {
      ++p.episodes;
      EpisodeRecord rec;
      rec.step = p.total_steps;
      rec.episode = p.episodes;
      rec.ret = p.episode_return;
      rec.length = p.episode_steps;
      if (p.episode_updates > 0) {
        rec.q_loss = p.episode_q_loss / static_cast<double>(p.episode_updates);
        rec.pi_loss = p.episode_pi_loss / static_cast<double>(p.episode_updates);
      }
      log.episodes.push_back(rec);
      p.episode_active = false;
    }
  }
  return log;
}

TrainingLog train(SwingupEnv& env, SacAgent& agent, const SacConfig& cfg,
                  std::uint64_t steps) {
  if (steps == 0) return {};
  cfg.validate();
  if (cfg.hidden.size() + 2 != agent.policy.widths().size())
    throw ConfigError("SAC config hidden widths do not match the agent networks");
  agent.config = cfg;
  TrainingSession session(env, agent);
  return session.run(steps);
}

}  // namespace swingup
