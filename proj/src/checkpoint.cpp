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

#include "swingup/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "swingup/env.hpp"
#include "swingup/errors.hpp"

namespace swingup {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}

  void u8(std::uint8_t v) { os_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f64s(const double* p, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i) f64(p[i]);
  }
  void bytes(const char* p, std::size_t n) { os_.write(p, static_cast<std::streamsize>(n)); }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  std::uint8_t u8() {
    const int c = is_.get();
    if (c == std::char_traits<char>::eof()) throw IoError("checkpoint is truncated");
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void f64s(double* p, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i) p[i] = f64();
  }
  std::string bytes(std::size_t n) {
    std::string s(n, '\0');
    is_.read(s.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) throw IoError("checkpoint is truncated");
    return s;
  }

 private:
  std::istream& is_;
};

void write_adam(Writer& w, const AdamState& s) {
  w.u64(s.step);
  w.f64s(s.m.data(), s.m.size());
  w.f64s(s.v.data(), s.v.size());
}

AdamState read_adam(Reader& r, Eigen::Index n) {
  AdamState s(n);
  s.step = r.u64();
  r.f64s(s.m.data(), n);
  r.f64s(s.v.data(), n);
  return s;
}

constexpr std::uint32_t kMaxLayers = 64;
constexpr std::uint32_t kMaxWidth = 1u << 20;

}  // namespace

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt) {
  Writer w(os);
  const SacAgent& a = ckpt.agent;
  w.bytes(kCheckpointMagic, sizeof kCheckpointMagic);
  w.u32(kCheckpointVersion);
  const Mlp* nets[] = {&a.policy, &a.q1, &a.q2, &a.q1_target, &a.q2_target};
  w.u32(5);
  for (const Mlp* net : nets) {
    w.u32(static_cast<std::uint32_t>(net->num_layers()));
    for (int width : net->widths()) w.u32(static_cast<std::uint32_t>(width));
  }
  // The flat parameter vector is already W (row-major) then b per layer.
  for (const Mlp* net : nets) w.f64s(net->params().data(), net->num_params());
  write_adam(w, a.policy_opt);
  write_adam(w, a.q1_opt);
  write_adam(w, a.q2_opt);

  const SacConfig& c = a.config;
  for (double v : {c.gamma, c.alpha, c.polyak, c.lr, c.adam_beta1, c.adam_beta2, c.adam_eps, c.reward_scale}) w.f64(v);
  for (std::uint64_t v : {c.batch_size, c.warmup_steps, c.update_every, c.buffer_capacity, c.seed}) w.u64(v);

  w.u8(ckpt.roa ? 1 : 0);
  if (ckpt.roa) {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) w.f64(ckpt.roa->S(i, j));
    w.f64(ckpt.roa->rho);
    const Vec4 g = ckpt.roa->goal.vec();
    w.f64s(g.data(), 4);
  }

  w.u8(ckpt.session ? 1 : 0);
  if (ckpt.session) {
    const SessionSnapshot& s = *ckpt.session;
    const TrainingProgress& p = s.progress;
    w.u64(p.total_steps);
    w.u64(p.episodes);
    w.u64(p.episode_steps);
    w.f64(p.episode_return);
    w.f64(p.episode_q_loss);
    w.f64(p.episode_pi_loss);
    w.u64(p.episode_updates);
    w.u8(p.episode_active ? 1 : 0);
    w.f64s(p.obs.data(), 4);
    const Vec4 x = s.env_state.vec();
    w.f64s(x.data(), 4);
    w.u64(static_cast<std::uint64_t>(s.env_steps));
    w.u32(static_cast<std::uint32_t>(s.rng_state.size()));
    w.bytes(s.rng_state.data(), s.rng_state.size());
    w.u64(c.buffer_capacity);
    w.u64(s.buffer_head);
    w.u64(s.buffer.size());
    for (const Transition& t : s.buffer) {
      w.f64s(t.s.data(), 4);
      w.f64s(t.a.data(), t.a.size());
      w.f64(t.r);
      w.f64s(t.s_next.data(), 4);
      w.u8(t.done ? 1 : 0);
    }
  }
  if (!os) throw IoError("failed to write checkpoint");
}

Checkpoint read_checkpoint(std::istream& is) {
  Reader r(is);
  const std::string magic = r.bytes(sizeof kCheckpointMagic);
  if (std::memcmp(magic.data(), kCheckpointMagic, sizeof kCheckpointMagic) != 0)
    throw IoError("not a SAC checkpoint (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  if (r.u32() != 5) throw IoError("checkpoint must hold exactly 5 networks");

  Checkpoint ckpt;
  SacAgent& a = ckpt.agent;
  Mlp* nets[] = {&a.policy, &a.q1, &a.q2, &a.q1_target, &a.q2_target};
  for (Mlp* net : nets) {
    const std::uint32_t layers = r.u32();
    if (layers == 0 || layers > kMaxLayers) throw IoError("checkpoint has an invalid layer count");
    std::vector<int> widths;
    for (std::uint32_t i = 0; i <= layers; ++i) {
      const std::uint32_t wdt = r.u32();
      if (wdt == 0 || wdt > kMaxWidth) throw IoError("checkpoint has an invalid layer width");
      widths.push_back(static_cast<int>(wdt));
    }
    *net = Mlp(widths);
  }
  if (a.q1.widths() != a.q2.widths() || a.q1.widths() != a.q1_target.widths() ||
      a.q1.widths() != a.q2_target.widths())
    throw IoError("checkpoint critic networks disagree in shape");
  for (Mlp* net : nets) r.f64s(net->params().data(), net->num_params());
  a.policy_opt = read_adam(r, a.policy.num_params());
  a.q1_opt = read_adam(r, a.q1.num_params());
  a.q2_opt = read_adam(r, a.q2.num_params());

  SacConfig& c = a.config;
  for (double* v : {&c.gamma, &c.alpha, &c.polyak, &c.lr, &c.adam_beta1, &c.adam_beta2, &c.adam_eps, &c.reward_scale}) *v = r.f64();
  for (std::uint64_t* v : {&c.batch_size, &c.warmup_steps, &c.update_every, &c.buffer_capacity, &c.seed}) *v = r.u64();
  const auto& pw = a.policy.widths();
  c.hidden.assign(pw.begin() + 1, pw.end() - 1);

  if (r.u8() != 0) {
    RoaEstimate roa;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) roa.S(i, j) = r.f64();
    roa.rho = r.f64();
    Vec4 g;
    r.f64s(g.data(), 4);
    roa.goal = State::from(g);
    ckpt.roa = roa;
  }

  if (r.u8() != 0) {
    SessionSnapshot s;
    TrainingProgress& p = s.progress;
    p.total_steps = r.u64();
    p.episodes = r.u64();
    p.episode_steps = r.u64();
    p.episode_return = r.f64();
    p.episode_q_loss = r.f64();
    p.episode_pi_loss = r.f64();
    p.episode_updates = r.u64();
    p.episode_active = r.u8() != 0;
    r.f64s(p.obs.data(), 4);
    Vec4 x;
    r.f64s(x.data(), 4);
    s.env_state = State::from(x);
    s.env_steps = static_cast<int>(r.u64());
    s.rng_state = r.bytes(r.u32());
    const std::uint64_t capacity = r.u64();
    if (capacity != c.buffer_capacity) throw IoError("checkpoint replay capacity mismatch");
    s.buffer_head = r.u64();
    const std::uint64_t size = r.u64();
    if (size > capacity) throw IoError("checkpoint replay buffer overflows its capacity");
    const int k = a.action_dim();
    s.buffer.reserve(size);
    for (std::uint64_t i = 0; i < size; ++i) {
      Transition t;
      r.f64s(t.s.data(), 4);
      t.a.resize(k);
      r.f64s(t.a.data(), k);
      t.r = r.f64();
      r.f64s(t.s_next.data(), 4);
      t.done = r.u8() != 0;
      s.buffer.push_back(std::move(t));
    }
    ckpt.session = std::move(s);
  }
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    write_checkpoint(out, ckpt);
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw IoError("failed writing checkpoint '" + tmp + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place at '" + path + "': " + ec.message());
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  return read_checkpoint(in);
}

SessionSnapshot snapshot_session(const TrainingSession& session, const SwingupEnv& env) {
  SessionSnapshot s;
  s.progress = session.progress();
  s.env_state = env.state();
  s.env_steps = env.steps();
  s.rng_state = session.rng().serialize();
  s.buffer_head = session.buffer().head();
  s.buffer.reserve(session.buffer().size());
  for (std::size_t i = 0; i < session.buffer().size(); ++i) s.buffer.push_back(session.buffer().at(i));
  return s;
}

void restore_session(TrainingSession& session, SwingupEnv& env, const SessionSnapshot& snap,
                     int action_dim) {
  ReplayBuffer buffer(session.buffer().capacity(), action_dim);
  buffer.restore(snap.buffer_head, snap.buffer);
  Rng rng;
  rng.deserialize(snap.rng_state);
  session.restore(snap.progress, std::move(buffer), std::move(rng));
  if (snap.progress.episode_active) env.set_state(snap.env_state, snap.env_steps);
}

}  // namespace swingup
