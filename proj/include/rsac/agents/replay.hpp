#pragma once

#include "rsac/agents/history.hpp"

#include <cstddef>
#include <vector>

namespace rsac::agents {

/// Replay record [h_t, a_t, h_{t+1}, r_t, done]. `done` marks terminal
/// transitions (no bootstrap); time-limit truncation is not terminal.
struct TransitionH {
  History h;
  std::vector<float> action;
  History h_next;
  float reward = 0.0f;
  bool done = false;
};

/// Fixed-capacity ring of transitions with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void add(TransitionH transition);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  const TransitionH& at(std::size_t i) const { return store_.at(i); }

  /// `count` distinct indices drawn uniformly (Floyd's algorithm).
  std::vector<std::size_t> sample_indices(std::size_t count, nn::Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
  std::vector<TransitionH> store_;
};

}  // namespace rsac::agents
