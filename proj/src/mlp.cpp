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

#include "swingup/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace swingup {

Mlp::Mlp(std::vector<int> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw std::invalid_argument("Mlp needs at least input and output widths");
  Eigen::Index n = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    if (widths_[l] <= 0 || widths_[l + 1] <= 0) throw std::invalid_argument("Mlp widths must be positive");
    offsets_.push_back(n);
    n += static_cast<Eigen::Index>(widths_[l]) * widths_[l + 1] + widths_[l + 1];
  }
  params_ = Eigen::VectorXd::Zero(n);
}

void Mlp::init(Rng& rng) {
  for (int l = 0; l < num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths_[l]));
    const Eigen::Index size = static_cast<Eigen::Index>(widths_[l]) * widths_[l + 1] + widths_[l + 1];
    for (Eigen::Index i = 0; i < size; ++i) params_[offsets_[l] + i] = rng.uniform(-bound, bound);
  }
}

Eigen::Map<const Mlp::RowMajor> Mlp::weight_map(int l) const {
  return {params_.data() + offsets_[l], widths_[l + 1], widths_[l]};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias_map(int l) const {
  return {params_.data() + offsets_[l] + static_cast<Eigen::Index>(widths_[l]) * widths_[l + 1],
          widths_[l + 1]};
}

Eigen::MatrixXd Mlp::weight(int l) const { return weight_map(l); }
Eigen::VectorXd Mlp::bias(int l) const { return bias_map(l); }

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd h = x;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = weight_map(l) * h;
    z.colwise() += bias_map(l);
    if (l + 1 < num_layers()) z = z.array().tanh().matrix();
    h = std::move(z);
  }
  return h;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Tape& tape) const {
  tape.activations.clear();
  tape.activations.reserve(widths_.size());
  tape.activations.push_back(x);
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = weight_map(l) * tape.activations.back();
    z.colwise() += bias_map(l);
    if (l + 1 < num_layers()) z = z.array().tanh().matrix();
    tape.activations.push_back(std::move(z));
  }
  return tape.activations.back();
}

Eigen::MatrixXd Mlp::backward(const Tape& tape, const Eigen::MatrixXd& grad_out,
                              Eigen::VectorXd* grad) const {
  Eigen::MatrixXd delta = grad_out;  // dL/d(pre-activation) of the current layer
  for (int l = num_layers() - 1; l >= 0; --l) {
    if (l + 1 < num_layers()) {
      const Eigen::MatrixXd& h = tape.activations[l + 1];
      delta.array() *= 1.0 - h.array().square();
    }
    const Eigen::MatrixXd& input = tape.activations[l];
    if (grad != nullptr) {
      Eigen::Map<RowMajor> gW(grad->data() + offsets_[l], widths_[l + 1], widths_[l]);
      Eigen::Map<Eigen::VectorXd> gb(
          grad->data() + offsets_[l] + static_cast<Eigen::Index>(widths_[l]) * widths_[l + 1],
          widths_[l + 1]);
      gW.noalias() += delta * input.transpose();
      gb += delta.rowwise().sum();
    }
    delta = weight_map(l).transpose() * delta;
  }
  return delta;
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
               AdamState& state, const AdamOptions& opt) {
  state.step += 1;
  state.m = opt.beta1 * state.m + (1.0 - opt.beta1) * grad;
  state.v = opt.beta2 * state.v + (1.0 - opt.beta2) * grad.cwiseAbs2();
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(opt.beta1, t);
  const double c2 = 1.0 - std::pow(opt.beta2, t);
  params.array() -= opt.lr * (state.m.array() / c1) /
                    ((state.v.array() / c2).sqrt() + opt.eps);
}

void polyak_update(Mlp& target, const Mlp& source, double rate) {
  target.params() = (1.0 - rate) * target.params() + rate * source.params();
}

}  // namespace swingup
