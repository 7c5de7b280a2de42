#include "rsac/agents/history.hpp"

#include <algorithm>
#include <stdexcept>

namespace rsac::agents {

History::History(std::size_t obs_dim, std::size_t act_dim, std::size_t l_max, std::span<const double> first_obs)
    : obs_dim_(obs_dim), act_dim_(act_dim), l_max_(l_max), current_(first_obs.begin(), first_obs.end()) {
  if (first_obs.size() != obs_dim) throw std::invalid_argument("history: observation width mismatch");
  pairs_.reserve(l_max * frame_dim());
}

void History::push(std::span<const double> action, std::span<const double> next_obs) {
  if (action.size() != act_dim_ || next_obs.size() != obs_dim_) {
    throw std::invalid_argument("history: push shape mismatch");
  }
  if (l_max_ > 0) {
    if (pair_count() == l_max_) pairs_.erase(pairs_.begin(), pairs_.begin() + static_cast<long>(frame_dim()));
    pairs_.insert(pairs_.end(), current_.begin(), current_.end());
    for (double a : action) pairs_.push_back(static_cast<float>(a));
  }
  std::transform(next_obs.begin(), next_obs.end(), current_.begin(),
                 [](double v) { return static_cast<float>(v); });
}

std::span<const float> History::pair_obs(std::size_t i) const {
  if (i >= pair_count()) throw std::out_of_range("history pair index");
  return std::span<const float>(pairs_).subspan(i * frame_dim(), obs_dim_);
}

std::span<const float> History::pair_act(std::size_t i) const {
  if (i >= pair_count()) throw std::out_of_range("history pair index");
  return std::span<const float>(pairs_).subspan(i * frame_dim() + obs_dim_, act_dim_);
}

template <class T>
HistoryBatch<T> make_history_batch(std::span<const History* const> histories, bool with_frames) {
  if (histories.empty()) throw std::invalid_argument("empty history batch");
  const History& first = *histories.front();
  const auto batch = static_cast<Eigen::Index>(histories.size());
  const auto obs_dim = static_cast<Eigen::Index>(first.obs_dim());
  const auto frame_dim = static_cast<Eigen::Index>(first.frame_dim());

  HistoryBatch<T> out;
  out.current.resize(batch, obs_dim);
  out.lengths.resize(histories.size());
  int steps = 1;
  for (Eigen::Index b = 0; b < batch; ++b) {
    const History& h = *histories[b];
    if (h.obs_dim() != first.obs_dim() || h.act_dim() != first.act_dim()) {
      throw std::invalid_argument("history batch mixes shapes");
    }
    const auto cur = h.current();
    for (Eigen::Index j = 0; j < obs_dim; ++j) out.current(b, j) = static_cast<T>(cur[j]);
    out.lengths[b] = static_cast<int>(h.pair_count()) + 1;
    steps = std::max(steps, out.lengths[b]);
  }
  if (!with_frames) return out;

  out.frames = nn::Mat<T>::Zero(steps * batch, frame_dim);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const History& h = *histories[b];
    const auto pairs = static_cast<Eigen::Index>(h.pair_count());
    for (Eigen::Index t = 0; t < pairs; ++t) {
      const auto o = h.pair_obs(t);
      const auto a = h.pair_act(t);
      auto row = out.frames.row(t * batch + b);
      for (Eigen::Index j = 0; j < obs_dim; ++j) row(j) = static_cast<T>(o[j]);
      for (Eigen::Index j = 0; j < frame_dim - obs_dim; ++j) row(obs_dim + j) = static_cast<T>(a[j]);
    }
    out.frames.row(pairs * batch + b).leftCols(obs_dim) = out.current.row(b);
  }
  return out;
}

template HistoryBatch<float> make_history_batch<float>(std::span<const History* const>, bool);
template HistoryBatch<double> make_history_batch<double>(std::span<const History* const>, bool);

}  // namespace rsac::agents
