#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rsac::envs {

enum class Domain { kPendulum, kCartPole };

Domain parse_domain(std::string_view id);
std::string_view domain_id(Domain domain);

using Rng = std::mt19937_64;
using Observation = std::vector<double>;
using Action = std::vector<double>;

/// Misspecified dynamics parameter, expressed as multipliers on the nominal
/// physical quantities. `multiplier` scales pole length; `mass_multiplier`
/// scales pole mass and stays at 1 unless mass perturbation is requested.
struct DynamicsParams {
  double multiplier = 1.0;
  double mass_multiplier = 1.0;

  friend bool operator==(const DynamicsParams&, const DynamicsParams&) = default;
};

/// Uniform uncertainty interval over the length multiplier.
struct ParamSet {
  double lo = 1.0;
  double hi = 1.0;

  /// Ω = [1/κ, κ].
  static ParamSet symmetric(double kappa);

  bool contains(double multiplier) const { return multiplier >= lo && multiplier <= hi; }
  double clamp(double multiplier) const;
  void validate() const;
};

DynamicsParams sample_params(const ParamSet& set, Rng& rng);

/// Concrete simulator state. Pendulum uses q = (θ, θ̇, -, -); CartPole uses
/// q = (x, ẋ, θ, θ̇).
struct EnvState {
  Domain domain = Domain::kPendulum;
  std::array<double, 4> q{};
  int step_count = 0;

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  /// Episode is over (termination or time limit).
  bool done = false;
  /// Episode ended by a terminal condition rather than the time limit.
  bool terminated = false;
};

/// Raised by param_gradient on domains without analytic dynamics access.
class GradientUnavailable : public std::runtime_error {
 public:
  explicit GradientUnavailable(std::string_view domain)
      : std::runtime_error("gradient attack unavailable for domain '" + std::string(domain) + "'") {}
};

/// Deterministic classic-control environment with a fork-and-peek step.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Domain domain() const = 0;
  virtual std::size_t obs_dim() const = 0;
  virtual std::size_t act_dim() const { return 1; }
  virtual int episode_limit() const = 0;

  /// Seeds the environment stream and draws an initial state.
  Observation reset(std::uint64_t seed);
  StepResult step(std::span<const double> action);

  /// Next observation under `params` from `state`; touches no live state.
  Observation peek_step(const EnvState& state, const DynamicsParams& params,
                        std::span<const double> action) const;

  /// d(peek_step)/d(multiplier) by central differences, one entry per
  /// observation component.
  virtual std::vector<double> param_gradient(const EnvState& state, const DynamicsParams& params,
                                             std::span<const double> action,
                                             double h = 1e-5) const;

  void set_params(const DynamicsParams& params);
  const DynamicsParams& params() const { return params_; }

  const EnvState& state() const { return state_; }
  /// Installs an explicit state (tests and attack tooling).
  void set_state(const EnvState& state);
  bool finished() const { return finished_; }

  Observation observe() const { return observe(state_); }

  virtual Observation observe(const EnvState& state) const = 0;
  /// One integrator step; pure in all arguments.
  virtual EnvState advance(const EnvState& state, const DynamicsParams& params,
                           std::span<const double> action) const = 0;
  virtual double reward(const EnvState& state, std::span<const double> action) const = 0;
  virtual bool is_terminal(const EnvState& state) const = 0;

  virtual std::unique_ptr<Environment> clone() const = 0;

 protected:
  virtual EnvState initial_state(Rng& rng) const = 0;

 private:
  EnvState state_{};
  DynamicsParams params_{};
  Rng rng_{0};
  bool finished_ = true;
};

/// Gym-style rod pendulum (θ = 0 upright), semi-implicit Euler.
class Pendulum final : public Environment {
 public:
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kDt = 0.05;
  static constexpr double kMaxSpeed = 8.0;
  static constexpr double kMaxTorque = 2.0;
  static constexpr int kEpisodeLimit = 200;

  Domain domain() const override { return Domain::kPendulum; }
  std::size_t obs_dim() const override { return 3; }
  int episode_limit() const override { return kEpisodeLimit; }

  Observation observe(const EnvState& state) const override;
  EnvState advance(const EnvState& state, const DynamicsParams& params,
                   std::span<const double> action) const override;
  double reward(const EnvState& state, std::span<const double> action) const override;
  bool is_terminal(const EnvState&) const override { return false; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<Pendulum>(*this); }

  static EnvState make_state(double theta, double theta_dot);

 protected:
  EnvState initial_state(Rng& rng) const override;
};

/// Continuous-force cart-pole on the classical Barto-Sutton-Anderson
/// equations, explicit Euler.
class CartPole final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  /// Half the pole length.
  static constexpr double kHalfLength = 0.5;
  static constexpr double kForceScale = 10.0;
  static constexpr double kDt = 0.02;
  static constexpr double kXThreshold = 2.4;
  static constexpr double kThetaThreshold = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
  static constexpr int kEpisodeLimit = 200;

  Domain domain() const override { return Domain::kCartPole; }
  std::size_t obs_dim() const override { return 4; }
  int episode_limit() const override { return kEpisodeLimit; }

  Observation observe(const EnvState& state) const override;
  EnvState advance(const EnvState& state, const DynamicsParams& params,
                   std::span<const double> action) const override;
  double reward(const EnvState&, std::span<const double>) const override { return 1.0; }
  bool is_terminal(const EnvState& state) const override;
  std::vector<double> param_gradient(const EnvState& state, const DynamicsParams& params,
                                     std::span<const double> action,
                                     double h = 1e-5) const override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<CartPole>(*this); }

  static EnvState make_state(double x, double x_dot, double theta, double theta_dot);

 protected:
  EnvState initial_state(Rng& rng) const override;
};

std::unique_ptr<Environment> make_env(Domain domain);

/// Wraps an angle into [-π, π).
double wrap_angle(double theta);

}  // namespace rsac::envs
