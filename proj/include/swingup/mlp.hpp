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

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "swingup/rng.hpp"

namespace swingup {

/// Fully connected network with tanh hidden layers and a linear output layer.
/// All weights and biases live in one flat parameter vector, layer by layer,
/// each layer stored as W (out x in, row-major) followed by b.
class Mlp {
 public:
  /// Activations cached by a forward pass; entry 0 is the input batch.
  struct Tape {
    std::vector<Eigen::MatrixXd> activations;
  };

  Mlp() = default;
  explicit Mlp(std::vector<int> widths);

  /// Uniform(-1/√fan_in, 1/√fan_in) for weights and biases.
  void init(Rng& rng);

  const std::vector<int>& widths() const { return widths_; }
  int input_size() const { return widths_.front(); }
  int output_size() const { return widths_.back(); }
  int num_layers() const { return static_cast<int>(widths_.size()) - 1; }
  Eigen::Index num_params() const { return params_.size(); }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  /// Layer l weights as an (out x in) matrix; row-major in the flat vector.
  Eigen::MatrixXd weight(int l) const;
  Eigen::VectorXd bias(int l) const;

  /// Columns of `x` are samples.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Tape& tape) const;

  /// Backpropagates dL/d(output) through the cached tape. Adds the parameter
  /// gradient to `grad` when non-null and returns dL/d(input).
  Eigen::MatrixXd backward(const Tape& tape, const Eigen::MatrixXd& grad_out,
                           Eigen::VectorXd* grad) const;

  friend bool operator==(const Mlp& a, const Mlp& b) {
    return a.widths_ == b.widths_ && a.params_ == b.params_;
  }

 private:
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> weight_map(int l) const;
  Eigen::Map<const Eigen::VectorXd> bias_map(int l) const;

  std::vector<int> widths_;
  std::vector<Eigen::Index> offsets_;  // start of each layer's W
  Eigen::VectorXd params_;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::uint64_t step = 0;

  explicit AdamState(Eigen::Index n = 0)
      : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

struct AdamOptions {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam step.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
               AdamState& state, const AdamOptions& opt);

/// target ← (1 - rate)·target + rate·source.
void polyak_update(Mlp& target, const Mlp& source, double rate);

}  // namespace swingup
