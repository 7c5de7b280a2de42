#pragma once

#include "rsac/nn/tensor.hpp"

#include <span>
#include <vector>

namespace rsac::agents {

/// Bounded trajectory h_t = [o_{t-k}, a_{t-k}, ..., o_{t-1}, a_{t-1}, o_t]
/// with at most `l_max` (observation, action) pairs before the current
/// observation. Stored in single precision, oldest pair first.
class History {
 public:
  History() = default;
  History(std::size_t obs_dim, std::size_t act_dim, std::size_t l_max, std::span<const double> first_obs);

  /// h_{t+1} = [h_t, a_t, o_{t+1}], dropping the oldest pair past l_max.
  void push(std::span<const double> action, std::span<const double> next_obs);

  std::size_t pair_count() const { return frame_dim() == 0 ? 0 : pairs_.size() / frame_dim(); }
  std::size_t obs_dim() const { return obs_dim_; }
  std::size_t act_dim() const { return act_dim_; }
  std::size_t l_max() const { return l_max_; }
  std::size_t frame_dim() const { return obs_dim_ + act_dim_; }

  std::span<const float> pair_obs(std::size_t i) const;
  std::span<const float> pair_act(std::size_t i) const;
  std::span<const float> current() const { return current_; }

  friend bool operator==(const History&, const History&) = default;

 private:
  std::size_t obs_dim_ = 0;
  std::size_t act_dim_ = 0;
  std::size_t l_max_ = 0;
  std::vector<float> pairs_;
  std::vector<float> current_;
};

/// Network-ready view of several histories.
///
/// `frames` is time-major ((steps * batch) x frame_dim): frame t of sample b
/// lives in row t * batch + b. A sample with k stored pairs has k + 1 valid
/// frames, [o_i, a_i] for each pair followed by [o_t, 0]; the rest are zero.
template <class T>
struct HistoryBatch {
  nn::Mat<T> frames;
  std::vector<int> lengths;
  nn::Mat<T> current;

  Eigen::Index batch() const { return current.rows(); }
};

template <class T>
HistoryBatch<T> make_history_batch(std::span<const History* const> histories, bool with_frames);

}  // namespace rsac::agents
