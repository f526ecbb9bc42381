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

#include "swingup/replay_buffer.hpp"

#include <stdexcept>

namespace swingup {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int action_dim)
    : capacity_(capacity), action_dim_(action_dim) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
  // Storage grows with the number of stored items, up to capacity.
}

std::size_t ReplayBuffer::slot(std::size_t i) const {
  return (head_ + capacity_ - size_ + i) % capacity_;
}

void ReplayBuffer::push(const Transition& t) {
  const auto idx = static_cast<Eigen::Index>(head_);
  if (idx >= s_.cols()) {
    const Eigen::Index grown = std::min<Eigen::Index>(
        static_cast<Eigen::Index>(capacity_), std::max<Eigen::Index>(1024, 2 * s_.cols()));
    s_.conservativeResize(4, grown);
    a_.conservativeResize(action_dim_, grown);
    r_.conservativeResize(grown);
    s_next_.conservativeResize(4, grown);
    done_.conservativeResize(grown);
  }
  s_.col(idx) = t.s;
  a_.col(idx) = t.a;
  r_[idx] = t.r;
  s_next_.col(idx) = t.s_next;
  done_[idx] = t.done ? 1.0 : 0.0;
  head_ = (head_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

Transition ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay buffer index");
  const auto k = static_cast<Eigen::Index>(slot(i));
  return {s_.col(k), a_.col(k), r_[k], s_next_.col(k), done_[k] != 0.0};
}

Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (size_ == 0) throw std::logic_error("cannot sample from an empty replay buffer");
  const auto n = static_cast<Eigen::Index>(batch_size);
  Batch b{Eigen::MatrixXd(4, n), Eigen::MatrixXd(action_dim_, n), Eigen::VectorXd(n),
          Eigen::MatrixXd(4, n), Eigen::VectorXd(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto k = static_cast<Eigen::Index>(slot(rng.index(size_)));
    b.s.col(j) = s_.col(k);
    b.a.col(j) = a_.col(k);
    b.r[j] = r_[k];
    b.s_next.col(j) = s_next_.col(k);
    b.done[j] = done_[k];
  }
  return b;
}

void ReplayBuffer::restore(std::size_t head, const std::vector<Transition>& oldest_first) {
  const bool full = oldest_first.size() == capacity_;
  if (oldest_first.size() > capacity_ || head >= capacity_ || (!full && head != oldest_first.size()))
    throw std::invalid_argument("inconsistent replay buffer snapshot");
  size_ = 0;
  head_ = full ? head : 0;
  const auto cols = static_cast<Eigen::Index>(full ? capacity_ : 0);
  s_.resize(4, cols);
  a_.resize(action_dim_, cols);
  r_.resize(cols);
  s_next_.resize(4, cols);
  done_.resize(cols);
  for (const Transition& t : oldest_first) push(t);
}

}  // namespace swingup
