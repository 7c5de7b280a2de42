#include "rsac/adversary/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace rsac::adversary {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

envs::DynamicsParams with_multiplier(const envs::DynamicsParams& base, double m) {
  envs::DynamicsParams p = base;
  p.multiplier = m;
  return p;
}

}  // namespace

std::string_view variant_id(Variant variant) {
  switch (variant) {
    case Variant::kNone: return "none";
    case Variant::kSample: return "sample";
    case Variant::kGradient: return "gradient";
    case Variant::kBlackbox: return "blackbox";
    case Variant::kRandom: return "random";
  }
  return "none";
}

Variant parse_variant(std::string_view id) {
  for (Variant v : {Variant::kNone, Variant::kSample, Variant::kGradient, Variant::kBlackbox, Variant::kRandom}) {
    if (variant_id(v) == id) return v;
  }
  throw std::invalid_argument("unknown attack variant '" + std::string(id) + "'");
}

void AttackConfig::validate() const {
  if (n < 1) throw std::invalid_argument("attack candidate count must be >= 1");
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("attack lambda must lie in [0, 1]");
  if (t_th < 0) throw std::invalid_argument("attack interval must be >= 0");
  if (random_period < 1) throw std::invalid_argument("random attack period must be >= 1");
  if (pgd_steps < 0 || pgd_step_fraction <= 0.0 || pgd_fd_step <= 0.0) {
    throw std::invalid_argument("invalid PGD settings");
  }
  omega_set.validate();
}

void AttackState::install(const envs::DynamicsParams& next, long t) {
  omega_prev = omega;
  omega = next;
  t_last = t;
}

bool attack_gate(std::span<const double> sigma, long t, const AttackState& state) {
  if (sigma.empty()) return false;
  const double mean = std::accumulate(sigma.begin(), sigma.end(), 0.0) / static_cast<double>(sigma.size());
  return mean < state.config.sigma_th && t - state.t_last > state.config.t_th;
}

std::vector<double> draw_candidates(const AttackConfig& config, envs::Rng& rng) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(config.n));
  for (int i = 0; i < config.n; ++i) out.push_back(envs::sample_params(config.omega_set, rng).multiplier);
  return out;
}

double dynamics_objective(const envs::Environment& env, const envs::EnvState& state,
                          std::span<const double> action, const AttackState& attack,
                          std::span<const double> baseline, double candidate) {
  const auto peek = env.peek_step(state, with_multiplier(attack.omega, candidate), action);
  const double lambda = attack.config.lambda;
  return (1.0 - lambda) * distance(baseline, peek) + lambda * std::abs(candidate - attack.omega_prev.multiplier);
}

double parameter_objective(const AttackState& attack, double candidate) {
  const double lambda = attack.config.lambda;
  return (1.0 - lambda) * std::abs(candidate - attack.omega.multiplier) +
         lambda * std::abs(candidate - attack.omega_prev.multiplier);
}

AttackResult best_dynamics_candidate(const envs::Environment& env, const envs::EnvState& state,
                                     std::span<const double> action, const AttackState& attack,
                                     std::span<const double> candidates) {
  if (candidates.empty()) throw std::invalid_argument("no attack candidates");
  const auto baseline = env.peek_step(state, attack.omega, action);
  AttackResult best{attack.omega, -std::numeric_limits<double>::infinity()};
  for (double c : candidates) {
    const double j = dynamics_objective(env, state, action, attack, baseline, c);
    if (j > best.score) best = {with_multiplier(attack.omega, c), j};
  }
  return best;
}

AttackResult env_attack_sample(const envs::Environment& env, const envs::EnvState& state,
                               std::span<const double> action, const AttackState& attack, envs::Rng& rng) {
  const auto candidates = draw_candidates(attack.config, rng);
  return best_dynamics_candidate(env, state, action, attack, candidates);
}

AttackResult env_attack_gradient(const envs::Environment& env, const envs::EnvState& state,
                                 std::span<const double> action, const AttackState& attack,
                                 std::vector<double>* trace) {
  const auto& cfg = attack.config;
  const auto& set = cfg.omega_set;
  (void)env.param_gradient(state, attack.omega, action);

  const auto baseline = env.peek_step(state, attack.omega, action);
  auto score = [&](double w) { return dynamics_objective(env, state, action, attack, baseline, w); };

  const double w0 = set.clamp(attack.omega.multiplier);
  const double j0 = score(w0);
  const double base_step = cfg.pgd_step_fraction * (set.hi - set.lo);
  const double h = cfg.pgd_fd_step;
  const double far_side =
      (set.hi - attack.omega_prev.multiplier >= attack.omega_prev.multiplier - set.lo) ? 1.0 : -1.0;

  // The start sits on the kink of ‖o_pred − o′_pred‖, where both one-sided
  // directions ascend; one branch follows each.
  auto branch = [&](double first_dir, std::vector<double>* accepted) {
    double w = w0;
    double j = j0;
    if (accepted) accepted->push_back(j);
    for (int k = 0; k < cfg.pgd_steps; ++k) {
      double dir = first_dir;
      if (k > 0) {
        const double g = (score(set.clamp(w + h)) - score(set.clamp(w - h))) / (2.0 * h);
        dir = g > 0.0 ? 1.0 : (g < 0.0 ? -1.0 : far_side);
      }
      double step = base_step;
      bool moved = false;
      for (int tries = 0; tries < 6 && !moved; ++tries, step *= 0.5) {
        const double next = set.clamp(w + dir * step);
        if (next == w) break;
        const double jn = score(next);
        if (jn >= j) {
          w = next;
          j = jn;
          moved = true;
        }
      }
      if (!moved) break;
      if (accepted) accepted->push_back(j);
    }
    return std::pair{w, j};
  };

  std::vector<double> up_trace, down_trace;
  const auto up = branch(1.0, trace ? &up_trace : nullptr);
  const auto down = branch(-1.0, trace ? &down_trace : nullptr);
  const bool take_up = up.second > down.second || (up.second == down.second && far_side > 0.0);
  if (trace) {
    const auto& t = take_up ? up_trace : down_trace;
    trace->insert(trace->end(), t.begin(), t.end());
  }
  const auto& best = take_up ? up : down;
  return {with_multiplier(attack.omega, best.first), best.second};
}

AttackResult best_parameter_candidate(const AttackState& attack, std::span<const double> candidates) {
  if (candidates.empty()) throw std::invalid_argument("no attack candidates");
  AttackResult best{attack.omega, -std::numeric_limits<double>::infinity()};
  for (double c : candidates) {
    const double j = parameter_objective(attack, c);
    if (j > best.score) best = {with_multiplier(attack.omega, c), j};
  }
  return best;
}

AttackResult env_attack_blackbox(const AttackState& attack, envs::Rng& rng) {
  const auto candidates = draw_candidates(attack.config, rng);
  return best_parameter_candidate(attack, candidates);
}

std::optional<envs::DynamicsParams> random_attack(const AttackState& attack, long t, envs::Rng& rng) {
  if (t <= 0 || t % attack.config.random_period != 0) return std::nullopt;
  return with_multiplier(attack.omega, envs::sample_params(attack.config.omega_set, rng).multiplier);
}

void SacaoConfig::validate() const {
  if (n < 1) throw std::invalid_argument("SAC-AO sample count must be >= 1");
  if (beta < 0.0) throw std::invalid_argument("SAC-AO beta must be >= 0");
  if (clean_fraction < 0.0 || clean_fraction > 1.0) throw std::invalid_argument("clean_fraction must lie in [0, 1]");
}

namespace {

using Tape = nn::Tape<float>;

void require_flat(const agents::AgentNets<float>& nets) {
  if (nets.arch() != agents::Arch::kFlat) throw std::logic_error("observation attack needs a flat agent");
}

nn::Mat<float> row(std::span<const double> v) {
  nn::Mat<float> m(1, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = static_cast<float>(v[i]);
  return m;
}

}  // namespace

double critic_value(const agents::AgentNets<float>& nets, std::span<const double> obs,
                    std::span<const double> action) {
  require_flat(nets);
  Tape tape;
  auto p1 = nn::bind_frozen(tape, nets.q1.params());
  auto p2 = nn::bind_frozen(tape, nets.q2.params());
  auto s = tape.constant(row(obs));
  auto a = tape.constant(row(action));
  auto q = tape.minimum(nets.q1.q_from_obs(tape, p1, s, a), nets.q2.q_from_obs(tape, p2, s, a));
  return tape.scalar(q);
}

std::vector<double> mean_action(const agents::AgentNets<float>& nets, std::span<const double> obs) {
  require_flat(nets);
  Tape tape;
  auto p = nn::bind_frozen(tape, nets.policy.params());
  auto head = nets.policy.policy_from_obs(tape, p, tape.constant(row(obs)));
  const auto& m = tape.value(tape.tanh(head.mean));
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.cols(); ++i) out[static_cast<std::size_t>(i)] = m(0, i);
  return out;
}

ObsAttackResult obs_attack_sacao(std::span<const double> obs, const agents::AgentNets<float>& nets,
                                 const SacaoConfig& config, envs::Rng& rng) {
  require_flat(nets);
  ObsAttackResult out;
  out.observation.assign(obs.begin(), obs.end());

  Tape tape;
  auto pp = nn::bind_frozen(tape, nets.policy.params());
  auto p1 = nn::bind_frozen(tape, nets.q1.params());
  auto p2 = nn::bind_frozen(tape, nets.q2.params());
  auto s = tape.input(row(obs));
  auto a = tape.tanh(nets.policy.policy_from_obs(tape, pp, s).mean);
  auto q = tape.minimum(nets.q1.q_from_obs(tape, p1, s, a), nets.q2.q_from_obs(tape, p2, s, a));
  tape.backward(q);
  const auto& g = tape.grad(s);
  const double norm = std::sqrt(g.template cast<double>().squaredNorm());
  out.q_min = critic_value(nets, obs, mean_action(nets, obs));
  if (!(norm > 0.0) || !std::isfinite(norm)) return out;

  out.direction.resize(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) out.direction[i] = g(0, static_cast<Eigen::Index>(i)) / norm;

  std::uniform_real_distribution<double> strength(0.0, config.beta);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> candidate(obs.size());
  for (int i = 0; i < config.n; ++i) {
    const double l = config.beta > 0.0 ? strength(rng) : 0.0;
    for (std::size_t k = 0; k < obs.size(); ++k) candidate[k] = obs[k] - l * out.direction[k];
    const double qi = critic_value(nets, obs, mean_action(nets, candidate));
    out.strengths.push_back(l);
    out.scores.push_back(qi);
    if (qi < best) {
      best = qi;
      out.observation = candidate;
      out.q_min = qi;
    }
  }
  return out;
}

}  // namespace rsac::adversary
