#pragma once

#include "rsac/agents/networks.hpp"
#include "rsac/agents/replay.hpp"
#include "rsac/nn/adam.hpp"
#include "rsac/nn/checkpoint.hpp"

#include <optional>
#include <span>

namespace rsac::agents {

struct SacConfig {
  Arch arch = Arch::kFlat;
  int obs_dim = 3;
  int act_dim = 1;
  /// Pairs kept in each history; forced to 0 for flat agents.
  int l_max = 10;
  double alpha = 0.2;
  double gamma = 0.99;
  double tau = 0.005;
  double lr = 3e-4;
  int batch_size = 64;
  std::size_t buffer_capacity = 50'000;
  NetWidths widths{};
};

template <class T>
Network<T> build_recurrent_net(int obs_dim, int act_dim, Role role, nn::Rng& rng, const std::string& prefix = "",
                               NetWidths widths = {}) {
  return Network<T>(NetSpec{Arch::kRecurrent, role, obs_dim, act_dim, widths}, prefix, rng);
}

template <class T>
Network<T> build_flat_net(int obs_dim, int act_dim, Role role, nn::Rng& rng, const std::string& prefix = "",
                          NetWidths widths = {}) {
  return Network<T>(NetSpec{Arch::kFlat, role, obs_dim, act_dim, widths}, prefix, rng);
}

/// Policy φ, twin critics θ₁ θ₂, value ψ and target value ψ̂.
template <class T>
struct AgentNets {
  Network<T> policy;
  Network<T> q1;
  Network<T> q2;
  Network<T> v;
  Network<T> v_target;
  T alpha = T(0.2);
  T gamma = T(0.99);

  static AgentNets create(const SacConfig& config, nn::Rng& rng);
  Arch arch() const { return policy.spec().arch; }
};

/// Sampled minibatch in network-ready form.
template <class T>
struct TrainingBatch {
  HistoryBatch<T> h;
  HistoryBatch<T> h_next;
  nn::Mat<T> actions;  // batch x act_dim
  nn::Mat<T> rewards;  // batch x 1
  nn::Mat<T> dones;    // batch x 1, 1 for terminal
};

template <class T>
TrainingBatch<T> make_training_batch(std::span<const TransitionH* const> transitions, Arch arch);

/// Loss nodes on one tape. Each loss reaches only its own network's
/// parameters: targets are detached, the policy loss sees frozen critics,
/// and V̂ is always frozen.
template <class T>
struct LossGraph {
  using Var = typename nn::Tape<T>::Var;
  Var j_v, j_q1, j_q2, j_pi;
  /// Sum of the four losses; one reverse sweep fills every network's grads.
  Var total;
  Var log_prob;    // batch x 1 for the fresh sample ã
  Var sigma;       // batch x act_dim
  Var min_q_fresh; // batch x 1, min(Q₁, Q₂)(h, ã)
};

/// J_V  = mean ½ (V_ψ(h) − [min Q(h, ã) − α log π(ã|h)])²
/// J_Qi = mean ½ (Q_θi(h, a) − [r + γ (1 − done) V_ψ̂(h′)])²
/// J_π  = mean [α log π(ã|h) − min Q(h, ã)]
/// with ã = tanh(μ + σ ⊙ noise).
template <class T>
LossGraph<T> compute_losses(nn::Tape<T>& tape, AgentNets<T>& nets, const TrainingBatch<T>& batch,
                            const nn::Mat<T>& noise);

enum class ActionMode { kSample, kMean };

struct PolicyOutput {
  std::vector<double> action;
  std::vector<double> sigma_pre;
  std::optional<double> log_prob;
  double mean_sigma() const;
};

/// Sample mode draws ε from `rng`; mean mode returns tanh(μ) and leaves
/// `rng` untouched.
template <class T>
PolicyOutput select_action(const Network<T>& policy, const History& h, ActionMode mode, nn::Rng& rng);

struct LossReport {
  bool skipped = true;
  double v_loss = 0.0;
  double q1_loss = 0.0;
  double q2_loss = 0.0;
  double pi_loss = 0.0;
  double mean_sigma = 0.0;
};

/// Single-precision SAC learner: networks, their Adam states and the
/// minibatch sampler.
class SacLearner {
 public:
  SacLearner(const SacConfig& config, nn::Rng& init_rng, std::uint64_t sample_seed);

  /// One gradient step per network (V, Q₁, Q₂, π) from one batch, then
  /// ψ̂ ← τψ + (1 − τ)ψ̂. No-op when the buffer holds fewer than batch_size.
  LossReport update(const ReplayBuffer& buffer);

  AgentNets<float>& nets() { return nets_; }
  const AgentNets<float>& nets() const { return nets_; }
  const SacConfig& config() const { return config_; }
  long updates() const { return updates_; }

 private:
  SacConfig config_;
  AgentNets<float> nets_;
  nn::Adam<float> opt_v_, opt_q1_, opt_q2_, opt_pi_;
  nn::Rng sample_rng_;
  long updates_ = 0;
};

/// Checkpoint of all five networks, with `metadata` recorded alongside.
nn::Checkpoint make_checkpoint(const AgentNets<float>& nets,
                               std::vector<std::pair<std::string, std::string>> metadata);
/// Rebuilds networks of the given configuration and loads values from the
/// checkpoint. Throws nn::ShapeError on architecture mismatch.
AgentNets<float> load_nets(const nn::Checkpoint& checkpoint, const SacConfig& config);

SacConfig config_from_checkpoint(const nn::Checkpoint& checkpoint);

}  // namespace rsac::agents
