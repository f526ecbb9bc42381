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

#include "swingup/dynamics.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "swingup/errors.hpp"

namespace swingup {

namespace {

constexpr std::array<const char*, 13> kModelKeys = {
    "m1", "m2", "l1", "l2", "r1", "r2", "I1", "I2",
    "g",  "b1", "b2", "tau_max", "actuation"};

double number_field(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("model key '" + key + "' must be a number");
  return j.get<double>();
}

void assign(ModelParams& p, const std::string& key, const nlohmann::json& v) {
  if (key == "actuation") {
    if (!v.is_string()) throw ConfigError("model key 'actuation' must be a string");
    p.actuation = actuation_from_string(v.get<std::string>());
    return;
  }
  double x = number_field(v, key);
  if (key == "m1") p.m1 = x;
  else if (key == "m2") p.m2 = x;
  else if (key == "l1") p.l1 = x;
  else if (key == "l2") p.l2 = x;
  else if (key == "r1") p.r1 = x;
  else if (key == "r2") p.r2 = x;
  else if (key == "I1") p.I1 = x;
  else if (key == "I2") p.I2 = x;
  else if (key == "g") p.g = x;
  else if (key == "b1") p.b1 = x;
  else if (key == "b2") p.b2 = x;
  else if (key == "tau_max") p.tau_max = x;
  else throw ConfigError("unknown model key '" + key + "'");
}

}  // namespace

void ModelParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("model parameter '") + name + "' must be positive");
  };
  positive(m1, "m1");
  positive(m2, "m2");
  positive(l1, "l1");
  positive(l2, "l2");
  positive(r1, "r1");
  positive(r2, "r2");
  positive(I1, "I1");
  positive(I2, "I2");
  positive(tau_max, "tau_max");
  if (r1 > l1) throw ConfigError("model parameter 'r1' must not exceed l1");
  if (r2 > l2) throw ConfigError("model parameter 'r2' must not exceed l2");
  if (!std::isfinite(g) || g < 0.0) throw ConfigError("model parameter 'g' must be finite and >= 0");
  if (!(b1 >= 0.0) || !(b2 >= 0.0) || !std::isfinite(b1) || !std::isfinite(b2))
    throw ConfigError("friction coefficients must be finite and >= 0");
}

Eigen::MatrixXd ModelParams::input_matrix() const {
  switch (actuation) {
    case Actuation::Pendubot: return Eigen::Vector2d(1.0, 0.0);
    case Actuation::Acrobot: return Eigen::Vector2d(0.0, 1.0);
    case Actuation::Full: return Eigen::Matrix2d::Identity();
  }
  return {};
}

Torque ModelParams::mask(const Torque& tau) const {
  switch (actuation) {
    case Actuation::Pendubot: return {tau[0], 0.0};
    case Actuation::Acrobot: return {0.0, tau[1]};
    case Actuation::Full: return tau;
  }
  return tau;
}

ModelParams ModelParams::defaults(Actuation actuation) {
  ModelParams p;
  p.actuation = actuation;
  return p;
}

std::string to_string(Actuation a) {
  switch (a) {
    case Actuation::Pendubot: return "pendubot";
    case Actuation::Acrobot: return "acrobot";
    case Actuation::Full: return "full";
  }
  return "?";
}

Actuation actuation_from_string(const std::string& s) {
  if (s == "pendubot") return Actuation::Pendubot;
  if (s == "acrobot") return Actuation::Acrobot;
  if (s == "full") return Actuation::Full;
  throw ConfigError("unknown actuation '" + s + "' (expected pendubot, acrobot or full)");
}

ModelParams model_params_overlay(const ModelParams& base, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("model parameters must be a key/value object");
  ModelParams p = base;
  for (const auto& [key, value] : j.items()) assign(p, key, value);
  p.validate();
  return p;
}

ModelParams model_params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("model parameters must be a key/value object");
  for (const char* key : kModelKeys)
    if (!j.contains(key)) throw ConfigError(std::string("model parameter file is missing key '") + key + "'");
  return model_params_overlay(ModelParams{}, j);
}

nlohmann::json model_params_to_json(const ModelParams& p) {
  nlohmann::ordered_json j;
  j["m1"] = p.m1;
  j["m2"] = p.m2;
  j["l1"] = p.l1;
  j["l2"] = p.l2;
  j["r1"] = p.r1;
  j["r2"] = p.r2;
  j["I1"] = p.I1;
  j["I2"] = p.I2;
  j["g"] = p.g;
  j["b1"] = p.b1;
  j["b2"] = p.b2;
  j["tau_max"] = p.tau_max;
  j["actuation"] = to_string(p.actuation);
  return j;
}

ModelParams load_model_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model parameter file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("model parameter file '" + path + "': " + e.what());
  }
  return model_params_from_json(j);
}

Mat2 mass_matrix(const Vec2& q, const ModelParams& p) {
  const double c2 = std::cos(q[1]);
  const double m22 = p.I2 + p.m2 * p.r2 * p.r2;
  const double m12 = m22 + p.m2 * p.l1 * p.r2 * c2;
  const double m11 = p.I1 + p.m1 * p.r1 * p.r1 + m22 +
                     p.m2 * (p.l1 * p.l1 + 2.0 * p.l1 * p.r2 * c2);
  Mat2 M;
  M << m11, m12, m12, m22;
  return M;
}

Mat2 mass_matrix_rate(const Vec2& q, const Vec2& qd, const ModelParams& p) {
  const double beta = p.m2 * p.l1 * p.r2 * std::sin(q[1]);
  Mat2 Md;
  Md << -2.0 * beta * qd[1], -beta * qd[1], -beta * qd[1], 0.0;
  return Md;
}

Mat2 coriolis_matrix(const Vec2& q, const Vec2& qd, const ModelParams& p) {
  const double beta = p.m2 * p.l1 * p.r2 * std::sin(q[1]);
  Mat2 C;
  C << -beta * qd[1], -beta * (qd[0] + qd[1]), beta * qd[0], 0.0;
  return C;
}

Vec2 gravity_vector(const Vec2& q, const ModelParams& p) {
  const double s12 = std::sin(q[0] + q[1]);
  return {p.g * (p.m1 * p.r1 + p.m2 * p.l1) * std::sin(q[0]) + p.g * p.m2 * p.r2 * s12,
          p.g * p.m2 * p.r2 * s12};
}

Vec2 friction_torque(const Vec2& qd, const ModelParams& p) {
  return {p.b1 * qd[0], p.b2 * qd[1]};
}

namespace {

// Solves M a = rhs for the 2x2 SPD mass matrix.
Vec2 solve_mass(const Mat2& M, const Vec2& rhs) {
  const double det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  const double scale = M(0, 0) * M(1, 1);
  if (!(std::abs(det) > 1e-12 * scale))
    throw NumericalError("mass matrix is numerically singular (det = " + std::to_string(det) + ")");
  return {(M(1, 1) * rhs[0] - M(0, 1) * rhs[1]) / det,
          (M(0, 0) * rhs[1] - M(1, 0) * rhs[0]) / det};
}

}  // namespace

Accel forward_dynamics(const State& x, const Torque& tau, const ModelParams& p) {
  const Vec2 q = x.q();
  const Vec2 qd = x.qd();
  const Vec2 rhs = p.mask(tau) - coriolis_matrix(q, qd, p) * qd -
                   gravity_vector(q, p) - friction_torque(qd, p);
  const Vec2 a = solve_mass(mass_matrix(q, p), rhs);
  return {a[0], a[1]};
}

Vec4 state_derivative(const State& x, const Torque& tau, const ModelParams& p) {
  const Accel a = forward_dynamics(x, tau, p);
  return {x.v1, x.v2, a.a1, a.a2};
}

State step_rk4(const State& x, const Torque& tau, double dt, const ModelParams& p) {
  if (!(dt > 0.0)) throw ConfigError("integration step must be positive");
  const Vec4 x0 = x.vec();
  const Vec4 k1 = state_derivative(x, tau, p);
  const Vec4 k2 = state_derivative(State::from(x0 + 0.5 * dt * k1), tau, p);
  const Vec4 k3 = state_derivative(State::from(x0 + 0.5 * dt * k2), tau, p);
  const Vec4 k4 = state_derivative(State::from(x0 + dt * k3), tau, p);
  const State next = State::from(x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  if (!next.finite()) throw NumericalError("RK4 step produced a non-finite state");
  return next;
}

Energy energy(const State& x, const ModelParams& p) {
  const Vec2 qd = x.qd();
  Energy e;
  e.kinetic = 0.5 * qd.dot(mass_matrix(x.q(), p) * qd);
  e.potential = p.g * ((p.m1 * p.r1 + p.m2 * p.l1) * (1.0 - std::cos(x.p1)) +
                       p.m2 * p.r2 * (1.0 - std::cos(x.p1 + x.p2)));
  return e;
}

Linearization linearize(const State& x0, const Torque& tau0, const ModelParams& p) {
  const Vec2 q = x0.q();
  const Vec2 qd = x0.qd();
  const Mat2 M = mass_matrix(q, p);
  const Vec2 qdd = forward_dynamics(x0, tau0, p).vec();

  const double s2 = std::sin(q[1]);
  const double c2 = std::cos(q[1]);
  const double c12 = std::cos(q[0] + q[1]);
  const double beta = p.m2 * p.l1 * p.r2 * s2;
  const double dbeta = p.m2 * p.l1 * p.r2 * c2;

  // Partials of the bias term h = C q̇ + G + F with respect to (q, q̇).
  Eigen::Matrix<double, 2, 4> dh = Eigen::Matrix<double, 2, 4>::Zero();
  const double g12 = p.g * p.m2 * p.r2 * c12;
  dh(0, 0) = p.g * (p.m1 * p.r1 + p.m2 * p.l1) * std::cos(q[0]) + g12;
  dh(0, 1) = -dbeta * (2.0 * qd[0] * qd[1] + qd[1] * qd[1]) + g12;
  dh(0, 2) = -2.0 * beta * qd[1] + p.b1;
  dh(0, 3) = -2.0 * beta * (qd[0] + qd[1]);
  dh(1, 0) = g12;
  dh(1, 1) = dbeta * qd[0] * qd[0] + g12;
  dh(1, 2) = 2.0 * beta * qd[0];
  dh(1, 3) = p.b2;

  // M depends on q2 only.
  Mat2 dM;
  dM << -2.0 * beta, -beta, -beta, 0.0;
  dh.col(1) += dM * qdd;

  const Mat2 Minv = M.inverse();
  Linearization lin;
  lin.A.setZero();
  lin.A(0, 2) = 1.0;
  lin.A(1, 3) = 1.0;
  lin.A.bottomRows<2>() = -Minv * dh;
  lin.B = Eigen::MatrixXd::Zero(4, p.num_inputs());
  lin.B.bottomRows(2) = Minv * p.input_matrix();
  return lin;
}

double end_effector_height(double p1, double p2, const ModelParams& p) {
  return -p.l1 * std::cos(p1) - p.l2 * std::cos(p1 + p2);
}

}  // namespace swingup
