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

#include "swingup/config.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "swingup/errors.hpp"
#include "swingup/rng.hpp"

namespace swingup {

using nlohmann::json;

namespace {

// Seed streams derived from the global seed.
constexpr std::uint64_t kSacStream = 1;
constexpr std::uint64_t kRoaStream = 2;
constexpr std::uint64_t kRobustStream = 3;

std::string type_name(const json& v) { return v.type_name(); }

/// Reads the keys of one object section and rejects anything not consumed.
class Section {
 public:
  // `doc` must outlive the section.
  Section(const json& doc, std::string name) : name_(std::move(name)) {
    if (doc.is_null()) return;
    if (!doc.is_object()) throw ConfigError("'" + name_ + "' must be an object");
    obj_ = &doc;
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    if (obj_ == nullptr) return nullptr;
    auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number()) fail(key, "a number", *v);
      out = v->get<double>();
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number_integer()) fail(key, "an integer", *v);
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned() || v->get<std::int64_t>() >= 0) {
          out = v->get<Int>();
          return;
        }
        fail(key, "a non-negative integer", *v);
      } else {
        out = v->get<Int>();
      }
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = raw(key)) {
      if (!v->is_string()) fail(key, "a string", *v);
      out = v->get<std::string>();
    }
  }

  void vec4(const std::string& key, Vec4& out) {
    if (const json* v = raw(key)) {
      std::vector<double> xs = numbers(key, *v);
      if (xs.size() != 4) throw ConfigError(path(key) + ": expected 4 numbers");
      out = Vec4(xs[0], xs[1], xs[2], xs[3]);
    }
  }

  std::vector<double> numbers(const std::string& key, const json& v) {
    if (!v.is_array()) fail(key, "an array of numbers", v);
    std::vector<double> xs;
    for (const json& e : v) {
      if (!e.is_number()) fail(key, "an array of numbers", v);
      xs.push_back(e.get<double>());
    }
    return xs;
  }

  std::string path(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

  /// Throws on the first unknown key.
  void finish() const {
    if (obj_ == nullptr) return;
    for (auto it = obj_->begin(); it != obj_->end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown config key '" + path(it.key()) + "'");
  }

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& expected, const json& v) const {
    throw ConfigError(path(key) + ": expected " + expected + ", got " + type_name(v));
  }

  std::string name_;
  const json* obj_ = nullptr;
  std::set<std::string> seen_;
};

json empty_if_missing(const json& doc, const char* key) {
  auto it = doc.find(key);
  return it == doc.end() ? json() : *it;
}

ModelParams parse_model(const json& j, Robot robot, const std::string& base_dir) {
  ModelParams p = ModelParams::defaults(actuation_of(robot));
  if (j.is_null()) return p;
  if (!j.is_object()) throw ConfigError("'model' must be an object");
  json inline_keys = j;
  if (auto it = j.find("file"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("model.file: expected a string");
    std::filesystem::path file = it->get<std::string>();
    if (file.is_relative()) file = std::filesystem::path(base_dir) / file;
    p = load_model_params(file.string());
    inline_keys.erase("file");
  }
  p = model_params_overlay(p, inline_keys);
  // The robot decides which joint is driven.
  if (inline_keys.contains("actuation") && p.actuation != actuation_of(robot))
    throw ConfigError("model.actuation '" + to_string(p.actuation) + "' contradicts env.robot '" +
                      to_string(robot) + "'");
  p.actuation = actuation_of(robot);
  p.validate();
  return p;
}

EnvConfig parse_env(const json& j, Robot robot, double tau_max) {
  EnvConfig e = EnvConfig::defaults(robot);
  Section s(j, "env");
  s.raw("robot");
  s.number("dt", e.dt);
  s.integer("episode_len", e.episode_len);
  s.number("v_max", e.v_max);
  s.number("reset_noise", e.reset_noise);
  RewardParams& r = e.reward;
  s.vec4("q_train", r.q_train);
  s.number("r_train", r.r_train);
  s.number("r_line", r.r_line);
  s.number("r_vel", r.r_vel);
  s.number("r_lqr", r.r_lqr);
  s.number("h_line_frac", r.h_line_frac);
  s.number("v_thresh", r.v_thresh);
  s.finish();
  e.tau_max = tau_max;
  e.validate();
  return e;
}

TrainConfig parse_sac(const json& j, Robot robot, std::uint64_t seed) {
  TrainConfig t;
  SacConfig& c = t.sac;
  if (robot == Robot::Acrobot) c.alpha = 0.05;
  c.reward_scale = 0.01;
  Section s(j, "sac");
  s.number("gamma", c.gamma);
  s.number("alpha", c.alpha);
  s.number("polyak", c.polyak);
  s.number("lr", c.lr);
  s.number("adam_beta1", c.adam_beta1);
  s.number("adam_beta2", c.adam_beta2);
  s.number("adam_eps", c.adam_eps);
  s.number("reward_scale", c.reward_scale);
  s.integer("batch_size", c.batch_size);
  if (const json* h = s.raw("hidden")) {
    if (!h->is_array() || h->empty()) throw ConfigError("sac.hidden: expected a non-empty array of integers");
    c.hidden.clear();
    for (const json& w : *h) {
      if (!w.is_number_integer() || w.get<std::int64_t>() <= 0)
        throw ConfigError("sac.hidden: expected positive integers");
      c.hidden.push_back(w.get<int>());
    }
  }
  s.integer("warmup_steps", c.warmup_steps);
  s.integer("update_every", c.update_every);
  s.integer("buffer_capacity", c.buffer_capacity);
  s.integer("steps", t.steps);
  s.integer("checkpoint_every", t.checkpoint_every);
  s.finish();
  c.seed = derive_seed(seed, {kSacStream});
  c.validate();
  return t;
}

void parse_lqr(const json& j, Robot robot, int k, LqrWeights& w, CareOptions& care) {
  w = robot == Robot::Pendubot ? LqrWeights::pendubot_defaults() : LqrWeights::acrobot_defaults();
  Section s(j, "lqr");
  s.vec4("q", w.q_diag);
  if (const json* r = s.raw("r")) {
    if (r->is_number()) {
      w.R = Eigen::MatrixXd::Identity(k, k) * r->get<double>();
    } else {
      std::vector<double> xs = s.numbers("r", *r);
      if (xs.size() != static_cast<std::size_t>(k * k))
        throw ConfigError("lqr.r: expected a number or " + std::to_string(k * k) + " numbers (row-major)");
      w.R.resize(k, k);
      for (int i = 0; i < k; ++i)
        for (int c = 0; c < k; ++c) w.R(i, c) = xs[static_cast<std::size_t>(i * k + c)];
    }
  }
  s.number("tolerance", care.tolerance);
  s.integer("max_iterations", care.max_iterations);
  s.finish();
  w.validate(k);
  if (!(care.tolerance > 0.0)) throw ConfigError("lqr.tolerance must be positive");
  if (care.max_iterations <= 0) throw ConfigError("lqr.max_iterations must be positive");
}

RoaConfig parse_roa(const json& j, std::uint64_t seed) {
  RoaConfig c;
  Section s(j, "roa");
  s.integer("n_samples", c.n_samples);
  s.integer("bisection_iters", c.bisection_iters);
  s.number("horizon_s", c.horizon_s);
  s.number("eps", c.eps);
  s.number("dt", c.dt);
  s.number("rho_max", c.rho_max);
  s.number("linearization_tolerance", c.linearization_tolerance);
  s.integer("threads", c.threads);
  s.finish();
  c.seed = derive_seed(seed, {kRoaStream});
  c.validate();
  return c;
}

EvalConfig parse_eval(const json& j, std::uint64_t seed) {
  EvalConfig e;
  Section s(j, "eval");
  s.number("horizon_s", e.horizon_s);
  s.number("dt_control", e.dt_control);
  s.number("height_frac", e.height_frac);
  s.number("t_hold", e.t_hold);
  s.integer("threads", e.threads);
  s.integer("verify_samples", e.verify_samples);
  s.number("verify_eps", e.verify_eps);

  const json ref_doc = empty_if_missing(j.is_object() ? j : json::object(), "score_ref");
  Section refs(ref_doc, "eval.score_ref");
  s.raw("score_ref");
  ScoreReferences& r = e.score_ref;
  refs.number("swingup_time", r.swingup_time);
  refs.number("energy", r.energy);
  refs.number("integrated_torque", r.integrated_torque);
  refs.number("torque_cost", r.torque_cost);
  refs.number("torque_smoothness", r.torque_smoothness);
  refs.number("velocity_cost", r.velocity_cost);
  refs.finish();

  const json rob_doc = empty_if_missing(j.is_object() ? j : json::object(), "robustness");
  Section rob(rob_doc, "eval.robustness");
  s.raw("robustness");
  for (PerturbationKind kind : kAllPerturbationKinds) {
    const std::uint64_t index = static_cast<std::uint64_t>(kind);
    PerturbationSpec spec = PerturbationSpec::defaults(kind, derive_seed(seed, {kRobustStream, index}));
    if (const json* v = rob.raw(to_string(kind))) spec.levels = rob.numbers(to_string(kind), *v);
    spec.validate();
    e.robustness.push_back(std::move(spec));
  }
  rob.finish();
  s.finish();

  if (!(e.horizon_s > 0.0)) throw ConfigError("eval.horizon_s must be positive");
  if (!(e.dt_control > 0.0)) throw ConfigError("eval.dt_control must be positive");
  if (!(e.height_frac > 0.0 && e.height_frac <= 1.0)) throw ConfigError("eval.height_frac must lie in (0, 1]");
  if (!(e.t_hold > 0.0)) throw ConfigError("eval.t_hold must be positive");
  for (double v : {r.swingup_time, r.energy, r.integrated_torque, r.torque_cost, r.torque_smoothness,
                   r.velocity_cost})
    if (!(v > 0.0)) throw ConfigError("eval.score_ref entries must be positive");
  if (e.threads <= 0) throw ConfigError("eval.threads must be positive");
  if (e.verify_samples <= 0) throw ConfigError("eval.verify_samples must be positive");
  if (!(e.verify_eps > 0.0)) throw ConfigError("eval.verify_eps must be positive");
  return e;
}

}  // namespace

std::string RunConfig::output_path(const std::string& name) const {
  return (std::filesystem::path(output_dir) / name).string();
}

std::string RunConfig::checkpoint_path() const { return output_path("agent.ckpt"); }

SuccessCriteria RunConfig::criteria(const RoaEstimate& roa) const {
  SuccessCriteria c;
  c.height_frac = eval.height_frac;
  c.t_hold = eval.t_hold;
  c.params = model;
  c.roa = roa;
  return c;
}

nlohmann::json default_config_json(Robot robot) {
  json doc = json::object();
  doc["env"] = {{"robot", to_string(robot)}};
  return doc;
}

RunConfig parse_config(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  Section top(doc, "");
  RunConfig cfg;
  top.integer("seed", cfg.seed);
  top.string("output_dir", cfg.output_dir);
  if (cfg.output_dir.empty()) throw ConfigError("output_dir must not be empty");

  Robot robot = Robot::Pendubot;
  const json env_doc = empty_if_missing(doc, "env");
  if (env_doc.is_object()) {
    if (auto it = env_doc.find("robot"); it != env_doc.end()) {
      if (!it->is_string()) throw ConfigError("env.robot: expected a string");
      robot = robot_from_string(it->get<std::string>());
    }
  }

  top.raw("model");
  cfg.model = parse_model(empty_if_missing(doc, "model"), robot, base_dir);
  top.raw("env");
  cfg.env = parse_env(env_doc, robot, cfg.model.tau_max);
  top.raw("sac");
  cfg.train = parse_sac(empty_if_missing(doc, "sac"), robot, cfg.seed);
  top.raw("lqr");
  parse_lqr(empty_if_missing(doc, "lqr"), robot, cfg.model.num_inputs(), cfg.lqr, cfg.care);
  top.raw("roa");
  cfg.roa = parse_roa(empty_if_missing(doc, "roa"), cfg.seed);
  top.raw("eval");
  cfg.eval = parse_eval(empty_if_missing(doc, "eval"), cfg.seed);
  top.finish();
  return cfg;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' must look like section.key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;

  if (!doc.is_object()) doc = json::object();
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    json& child = (*node)[part];
    if (child.is_null()) child = json::object();
    if (!child.is_object()) throw ConfigError("override key '" + key + "': '" + part + "' is not a section");
    node = &child;
    start = dot + 1;
  }
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  json doc = json::object();
  std::string base_dir = ".";
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    base_dir = std::filesystem::path(path).parent_path().string();
    if (base_dir.empty()) base_dir = ".";
  }
  for (const std::string& o : overrides) apply_override(doc, o);
  return parse_config(doc, base_dir);
}

nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["model"] = model_params_to_json(cfg.model);
  const EnvConfig& e = cfg.env;
  const RewardParams& r = e.reward;
  j["env"] = {{"robot", to_string(e.robot)},
              {"dt", e.dt},
              {"episode_len", e.episode_len},
              {"v_max", e.v_max},
              {"reset_noise", e.reset_noise},
              {"q_train", {r.q_train[0], r.q_train[1], r.q_train[2], r.q_train[3]}},
              {"r_train", r.r_train},
              {"r_line", r.r_line},
              {"r_vel", r.r_vel},
              {"r_lqr", r.r_lqr},
              {"h_line_frac", r.h_line_frac},
              {"v_thresh", r.v_thresh}};
  const SacConfig& s = cfg.train.sac;
  j["sac"] = {{"gamma", s.gamma},
              {"alpha", s.alpha},
              {"polyak", s.polyak},
              {"lr", s.lr},
              {"adam_beta1", s.adam_beta1},
              {"adam_beta2", s.adam_beta2},
              {"adam_eps", s.adam_eps},
              {"reward_scale", s.reward_scale},
              {"batch_size", s.batch_size},
              {"hidden", s.hidden},
              {"warmup_steps", s.warmup_steps},
              {"update_every", s.update_every},
              {"buffer_capacity", s.buffer_capacity},
              {"steps", cfg.train.steps},
              {"checkpoint_every", cfg.train.checkpoint_every}};
  std::vector<double> rv(cfg.lqr.R.data(), cfg.lqr.R.data() + cfg.lqr.R.size());
  const Vec4& q = cfg.lqr.q_diag;
  j["lqr"] = {{"q", {q[0], q[1], q[2], q[3]}},
              {"r", rv},
              {"tolerance", cfg.care.tolerance},
              {"max_iterations", cfg.care.max_iterations}};
  const RoaConfig& ro = cfg.roa;
  j["roa"] = {{"n_samples", ro.n_samples},
              {"bisection_iters", ro.bisection_iters},
              {"horizon_s", ro.horizon_s},
              {"eps", ro.eps},
              {"dt", ro.dt},
              {"rho_max", ro.rho_max},
              {"linearization_tolerance", ro.linearization_tolerance},
              {"threads", ro.threads}};
  const EvalConfig& ev = cfg.eval;
  nlohmann::ordered_json rob;
  for (const PerturbationSpec& p : ev.robustness) rob[to_string(p.kind)] = p.levels;
  const ScoreReferences& sr = ev.score_ref;
  j["eval"] = {{"horizon_s", ev.horizon_s},
               {"dt_control", ev.dt_control},
               {"height_frac", ev.height_frac},
               {"t_hold", ev.t_hold},
               {"threads", ev.threads},
               {"verify_samples", ev.verify_samples},
               {"verify_eps", ev.verify_eps},
               {"score_ref",
                {{"swingup_time", sr.swingup_time},
                 {"energy", sr.energy},
                 {"integrated_torque", sr.integrated_torque},
                 {"torque_cost", sr.torque_cost},
                 {"torque_smoothness", sr.torque_smoothness},
                 {"velocity_cost", sr.velocity_cost}}},
               {"robustness", rob}};
  return j;
}

}  // namespace swingup
