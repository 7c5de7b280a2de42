#include "rsac/agents/replay.hpp"

#include <algorithm>
#include <stdexcept>

namespace rsac::agents {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  store_.reserve(std::min<std::size_t>(capacity, 1u << 16));
}

void ReplayBuffer::add(TransitionH transition) {
  if (store_.size() < capacity_) {
    store_.push_back(std::move(transition));
  } else {
    store_[next_] = std::move(transition);
  }
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t count, nn::Rng& rng) const {
  if (count > size_) throw std::invalid_argument("cannot sample more transitions than stored");
  std::vector<std::size_t> picked;
  picked.reserve(count);
  for (std::size_t j = size_ - count; j < size_; ++j) {
    std::uniform_int_distribution<std::size_t> dist(0, j);
    const std::size_t t = dist(rng);
    if (std::find(picked.begin(), picked.end(), t) == picked.end()) {
      picked.push_back(t);
    } else {
      picked.push_back(j);
    }
  }
  return picked;
}

}  // namespace rsac::agents
