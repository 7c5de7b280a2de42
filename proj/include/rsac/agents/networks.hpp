#pragma once

#include "rsac/agents/history.hpp"
#include "rsac/nn/layers.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace rsac::agents {

enum class Arch { kFlat, kRecurrent };
enum class Role { kPolicy, kQ, kV };

std::string_view arch_id(Arch arch);
Arch parse_arch(std::string_view id);

/// Layer widths. Recurrent nets use all of them; flat nets use fc3 and fc4.
struct NetWidths {
  int fc1 = 64;
  int gru = 64;
  int fc2 = 8;
  int fc3 = 64;
  int fc4 = 64;
};

struct NetSpec {
  Arch arch = Arch::kFlat;
  Role role = Role::kV;
  int obs_dim = 1;
  int act_dim = 1;
  NetWidths widths{};
};

/// Policy, Q or V network.
///
/// Recurrent layout: sub-network A maps per-frame [o_i, a_i] through
/// FC1 (relu) and a GRU, keeps the hidden state after the last valid frame,
/// and applies FC2 (relu). Sub-network B maps o_t (policy, V) or [o_t, a_t]
/// (Q) through FC3 and FC4 (relu). The head reads [A, B].
/// Flat layout: sub-network B followed by the head.
/// The policy head emits (μ, log σ) per action dimension; Q and V heads emit
/// one scalar per sample.
template <class T>
class Network {
 public:
  using Tp = nn::Tape<T>;
  using Var = typename Tp::Var;

  struct PolicyHead {
    Var mean;
    Var log_std;
  };

  Network() = default;
  Network(const NetSpec& spec, const std::string& prefix, nn::Rng& rng);

  const NetSpec& spec() const { return spec_; }
  nn::ParamList<T>& params() { return params_; }
  const nn::ParamList<T>& params() const { return params_; }

  nn::BoundParams<T> bind(Tp& tape, bool trainable) {
    return trainable ? nn::bind(tape, params_, true) : nn::bind_frozen(tape, params_);
  }

  /// Sub-network A (batch x fc2). Recurrent nets only.
  Var encode_history(Tp& tape, const nn::BoundParams<T>& p, const HistoryBatch<T>& h) const;

  PolicyHead policy(Tp& tape, const nn::BoundParams<T>& p, const HistoryBatch<T>& h) const;
  /// V(h): batch x 1.
  Var value(Tp& tape, const nn::BoundParams<T>& p, const HistoryBatch<T>& h) const;
  /// Q(h, a): batch x 1. Pass `history_features` to reuse a sub-network A
  /// result (possibly detached) instead of recomputing it.
  Var q_value(Tp& tape, const nn::BoundParams<T>& p, const HistoryBatch<T>& h, Var action,
              std::optional<Var> history_features = std::nullopt) const;

  /// Flat networks with the observation as a tape node, so gradients can
  /// reach it.
  PolicyHead policy_from_obs(Tp& tape, const nn::BoundParams<T>& p, Var obs) const;
  Var q_from_obs(Tp& tape, const nn::BoundParams<T>& p, Var obs, Var action) const;

  /// Width of the head's input features.
  int feature_dim() const;

 private:
  Var features(Tp& tape, const nn::BoundParams<T>& p, Var obs, const HistoryBatch<T>* h,
               std::optional<Var> action, std::optional<Var> history_features) const;

  NetSpec spec_{};
  nn::ParamList<T> params_;
  nn::DenseLayer fc1_{}, fc2_{}, fc3_{}, fc4_{};
  nn::GruLayer gru_{};
  nn::DenseLayer head_{};
  nn::DenseLayer log_std_head_{};
};

template <class T>
Network<T>::Network(const NetSpec& spec, const std::string& prefix, nn::Rng& rng) : spec_(spec) {
  if (spec.obs_dim < 1 || spec.act_dim < 1) throw nn::ShapeError("network dims must be >= 1");
  const auto& w = spec.widths;
  if (spec.arch == Arch::kRecurrent) {
    fc1_ = nn::add_dense(params_, prefix + "fc1", spec.obs_dim + spec.act_dim, w.fc1, rng);
    gru_ = nn::add_gru(params_, prefix + "gru", w.fc1, w.gru, rng);
    fc2_ = nn::add_dense(params_, prefix + "fc2", w.gru, w.fc2, rng);
  }
  const int b_in = spec.obs_dim + (spec.role == Role::kQ ? spec.act_dim : 0);
  fc3_ = nn::add_dense(params_, prefix + "fc3", b_in, w.fc3, rng);
  fc4_ = nn::add_dense(params_, prefix + "fc4", w.fc3, w.fc4, rng);
  if (spec.role == Role::kPolicy) {
    head_ = nn::add_dense(params_, prefix + "mu", feature_dim(), spec.act_dim, rng);
    log_std_head_ = nn::add_dense(params_, prefix + "log_std", feature_dim(), spec.act_dim, rng);
  } else {
    head_ = nn::add_dense(params_, prefix + "out", feature_dim(), 1, rng);
  }
}

template <class T>
int Network<T>::feature_dim() const {
  return spec_.widths.fc4 + (spec_.arch == Arch::kRecurrent ? spec_.widths.fc2 : 0);
}

template <class T>
typename Network<T>::Var Network<T>::encode_history(Tp& tape, const nn::BoundParams<T>& p,
                                                    const HistoryBatch<T>& h) const {
  if (spec_.arch != Arch::kRecurrent) throw std::logic_error("encode_history on a flat network");
  if (h.frames.cols() != spec_.obs_dim + spec_.act_dim) throw nn::ShapeError("history frame width mismatch");
  Var frames = tape.constant(h.frames);
  Var x = tape.relu(nn::dense(tape, p, fc1_, frames));
  Var last = nn::gru_sequence(tape, p, gru_, x, h.lengths);
  return tape.relu(nn::dense(tape, p, fc2_, last));
}

template <class T>
typename Network<T>::Var Network<T>::features(Tp& tape, const nn::BoundParams<T>& p, Var obs,
                                              const HistoryBatch<T>* h, std::optional<Var> action,
                                              std::optional<Var> history_features) const {
  if (tape.value(obs).cols() != spec_.obs_dim) throw nn::ShapeError("observation width mismatch");
  Var b_in = action ? tape.concat_cols({obs, *action}) : obs;
  Var b = tape.relu(nn::dense(tape, p, fc4_, tape.relu(nn::dense(tape, p, fc3_, b_in))));
  if (spec_.arch == Arch::kFlat) return b;
  if (!history_features && h == nullptr) throw std::logic_error("recurrent network needs a history");
  Var a = history_features ? *history_features : encode_history(tape, p, *h);
  return tape.concat_cols({a, b});
}

template <class T>
typename Network<T>::PolicyHead Network<T>::policy(Tp& tape, const nn::BoundParams<T>& p,
                                                   const HistoryBatch<T>& h) const {
  if (spec_.role != Role::kPolicy) throw std::logic_error("policy() on a non-policy network");
  Var f = features(tape, p, tape.constant(h.current), &h, std::nullopt, std::nullopt);
  return {nn::dense(tape, p, head_, f), nn::dense(tape, p, log_std_head_, f)};
}

template <class T>
typename Network<T>::PolicyHead Network<T>::policy_from_obs(Tp& tape, const nn::BoundParams<T>& p, Var obs) const {
  if (spec_.role != Role::kPolicy || spec_.arch != Arch::kFlat) {
    throw std::logic_error("policy_from_obs needs a flat policy network");
  }
  Var f = features(tape, p, obs, nullptr, std::nullopt, std::nullopt);
  return {nn::dense(tape, p, head_, f), nn::dense(tape, p, log_std_head_, f)};
}

template <class T>
typename Network<T>::Var Network<T>::q_from_obs(Tp& tape, const nn::BoundParams<T>& p, Var obs, Var action) const {
  if (spec_.role != Role::kQ || spec_.arch != Arch::kFlat) throw std::logic_error("q_from_obs needs a flat Q network");
  return nn::dense(tape, p, head_, features(tape, p, obs, nullptr, action, std::nullopt));
}

template <class T>
typename Network<T>::Var Network<T>::value(Tp& tape, const nn::BoundParams<T>& p, const HistoryBatch<T>& h) const {
  if (spec_.role != Role::kV) throw std::logic_error("value() on a non-V network");
  return nn::dense(tape, p, head_, features(tape, p, tape.constant(h.current), &h, std::nullopt, std::nullopt));
}

template <class T>
typename Network<T>::Var Network<T>::q_value(Tp& tape, const nn::BoundParams<T>& p, const HistoryBatch<T>& h,
                                             Var action, std::optional<Var> history_features) const {
  if (spec_.role != Role::kQ) throw std::logic_error("q_value() on a non-Q network");
  if (tape.value(action).cols() != spec_.act_dim) throw nn::ShapeError("action width mismatch");
  return nn::dense(tape, p, head_, features(tape, p, tape.constant(h.current), &h, action, history_features));
}

}  // namespace rsac::agents
