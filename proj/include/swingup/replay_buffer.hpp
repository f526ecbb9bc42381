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

#include <Eigen/Dense>

#include "swingup/rng.hpp"

namespace swingup {

struct Transition {
  Eigen::Vector4d s;
  Eigen::VectorXd a;
  double r = 0.0;
  Eigen::Vector4d s_next;
  bool done = false;
};

/// Minibatch with one transition per column.
struct Batch {
  Eigen::MatrixXd s;       // 4 x N
  Eigen::MatrixXd a;       // k x N
  Eigen::VectorXd r;       // N
  Eigen::MatrixXd s_next;  // 4 x N
  Eigen::VectorXd done;    // N, 0 or 1

  Eigen::Index size() const { return r.size(); }
};

/// Fixed-capacity FIFO ring of transitions.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int action_dim);

  void push(const Transition& t);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  int action_dim() const { return action_dim_; }
  /// Slot that the next push overwrites.
  std::size_t head() const { return head_; }

  /// i-th stored transition, 0 = oldest.
  Transition at(std::size_t i) const;

  /// Uniform with replacement over stored items.
  Batch sample(std::size_t batch_size, Rng& rng) const;

  /// Restores contents from oldest-first transitions (checkpoint loading).
  void restore(std::size_t head, const std::vector<Transition>& oldest_first);

 private:
  std::size_t slot(std::size_t i) const;

  std::size_t capacity_;
  int action_dim_;
  std::size_t size_ = 0;
  std::size_t head_ = 0;
  Eigen::MatrixXd s_;
  Eigen::MatrixXd a_;
  Eigen::VectorXd r_;
  Eigen::MatrixXd s_next_;
  Eigen::VectorXd done_;
};

}  // namespace swingup
