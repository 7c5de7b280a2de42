#pragma once

#include "rsac/agents/sac.hpp"
#include "rsac/envs/environment.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rsac::adversary {

enum class Variant { kNone, kSample, kGradient, kBlackbox, kRandom };

std::string_view variant_id(Variant variant);
Variant parse_variant(std::string_view id);

struct AttackConfig {
  int n = 20;
  /// Exploration weight λ.
  double lambda = 0.1;
  envs::ParamSet omega_set{0.67, 1.5};
  double sigma_th = 0.2;
  int t_th = 40;
  Variant variant = Variant::kSample;
  int random_period = 100;
  /// PGD ascent steps and step size as a fraction of hi − lo.
  int pgd_steps = 10;
  double pgd_step_fraction = 0.1;
  /// Central-difference step for dJ/dω′.
  double pgd_fd_step = 1e-5;

  void validate() const;
};

/// ω, ω₋₁ and the step of the last installed attack.
struct AttackState {
  envs::DynamicsParams omega{};
  envs::DynamicsParams omega_prev{};
  long t_last = 0;
  AttackConfig config{};

  /// Makes `next` current, moving the old ω to ω₋₁.
  void install(const envs::DynamicsParams& next, long t);
};

/// mean(σ) < σ_th and t − t_last > t_th.
bool attack_gate(std::span<const double> sigma, long t, const AttackState& state);

struct AttackResult {
  envs::DynamicsParams omega{};
  double score = 0.0;
};

/// n uniform draws from Ω.
std::vector<double> draw_candidates(const AttackConfig& config, envs::Rng& rng);

/// J(ω′) = (1 − λ)‖o_pred − o′_pred‖ + λ|ω′ − ω₋₁|, with o_pred the peek
/// under the current ω.
double dynamics_objective(const envs::Environment& env, const envs::EnvState& state,
                          std::span<const double> action, const AttackState& attack,
                          std::span<const double> baseline, double candidate);

/// J(ω′) = (1 − λ)|ω′ − ω| + λ|ω′ − ω₋₁|.
double parameter_objective(const AttackState& attack, double candidate);

/// Argmax of dynamics_objective over `candidates`; the first of equal scores
/// wins.
AttackResult best_dynamics_candidate(const envs::Environment& env, const envs::EnvState& state,
                                     std::span<const double> action, const AttackState& attack,
                                     std::span<const double> candidates);

AttackResult env_attack_sample(const envs::Environment& env, const envs::EnvState& state,
                               std::span<const double> action, const AttackState& attack, envs::Rng& rng);

/// Projected sign ascent on J from the current ω. Steps that lower J are
/// halved and retried; each accepted score is appended to `trace` when given.
/// Throws envs::GradientUnavailable on domains without param_gradient.
AttackResult env_attack_gradient(const envs::Environment& env, const envs::EnvState& state,
                                 std::span<const double> action, const AttackState& attack,
                                 std::vector<double>* trace = nullptr);

AttackResult env_attack_blackbox(const AttackState& attack, envs::Rng& rng);
AttackResult best_parameter_candidate(const AttackState& attack, std::span<const double> candidates);

/// A fresh draw from Ω when t is a positive multiple of random_period.
std::optional<envs::DynamicsParams> random_attack(const AttackState& attack, long t, envs::Rng& rng);

struct SacaoConfig {
  int n = 20;
  double beta = 0.1;
  double clean_fraction = 0.5;

  void validate() const;
};

struct ObsAttackResult {
  envs::Observation observation;
  /// Unit ∇ₛQ(s, π(s)); empty when the gradient vanished.
  std::vector<double> direction;
  std::vector<double> strengths;
  std::vector<double> scores;
  double q_min = 0.0;
};

/// min(Q₁, Q₂)(s, a) for a flat agent.
double critic_value(const agents::AgentNets<float>& nets, std::span<const double> obs, std::span<const double> action);
/// tanh(μ(s)) for a flat agent.
std::vector<double> mean_action(const agents::AgentNets<float>& nets, std::span<const double> obs);

/// Candidates sᵢ = s − lᵢ·g with lᵢ ~ U(0, β), scored by Q(s, π_mean(sᵢ));
/// returns the minimizer.
ObsAttackResult obs_attack_sacao(std::span<const double> obs, const agents::AgentNets<float>& nets,
                                 const SacaoConfig& config, envs::Rng& rng);

/// Structured attack record.
struct AttackEvent {
  long step = 0;
  /// Variant id, or "sacao" for observation attacks.
  std::string kind;
  double omega_old = 1.0;
  double omega_new = 1.0;
  double score = 0.0;
  double mean_sigma = 0.0;
};

}  // namespace rsac::adversary
