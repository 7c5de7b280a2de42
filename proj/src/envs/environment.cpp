#include "rsac/envs/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rsac::envs {

Domain parse_domain(std::string_view id) {
  if (id == "pendulum") return Domain::kPendulum;
  if (id == "cartpole") return Domain::kCartPole;
  throw std::invalid_argument("unknown environment id '" + std::string(id) + "'");
}

std::string_view domain_id(Domain domain) {
  return domain == Domain::kPendulum ? "pendulum" : "cartpole";
}

ParamSet ParamSet::symmetric(double kappa) {
  if (!(kappa >= 1.0)) throw std::invalid_argument("kappa must be >= 1");
  return {1.0 / kappa, kappa};
}

double ParamSet::clamp(double multiplier) const { return std::clamp(multiplier, lo, hi); }

void ParamSet::validate() const {
  if (!(lo > 0.0 && lo <= hi)) throw std::invalid_argument("parameter set requires 0 < lo <= hi");
}

DynamicsParams sample_params(const ParamSet& set, Rng& rng) {
  set.validate();
  if (set.lo == set.hi) return {set.lo, 1.0};
  std::uniform_real_distribution<double> dist(set.lo, set.hi);
  return {dist(rng), 1.0};
}

double wrap_angle(double theta) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(theta + std::numbers::pi, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  return wrapped - std::numbers::pi;
}

namespace {

double action_component(std::span<const double> action) {
  if (action.size() != 1) throw std::invalid_argument("expected a 1-dimensional action");
  if (!std::isfinite(action[0])) throw std::invalid_argument("non-finite action");
  return std::clamp(action[0], -1.0, 1.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Environment

Observation Environment::reset(std::uint64_t seed) {
  rng_.seed(seed);
  state_ = initial_state(rng_);
  state_.step_count = 0;
  finished_ = false;
  return observe(state_);
}

StepResult Environment::step(std::span<const double> action) {
  if (finished_) throw std::logic_error("step called on a finished episode; call reset first");
  StepResult result;
  result.reward = reward(state_, action);
  state_ = advance(state_, params_, action);
  result.observation = observe(state_);
  result.terminated = is_terminal(state_);
  result.done = result.terminated || state_.step_count >= episode_limit();
  finished_ = result.done;
  return result;
}

Observation Environment::peek_step(const EnvState& state, const DynamicsParams& params,
                                   std::span<const double> action) const {
  return observe(advance(state, params, action));
}

std::vector<double> Environment::param_gradient(const EnvState& state, const DynamicsParams& params,
                                                std::span<const double> action, double h) const {
  DynamicsParams up = params;
  DynamicsParams down = params;
  up.multiplier += h;
  down.multiplier -= h;
  const Observation plus = peek_step(state, up, action);
  const Observation minus = peek_step(state, down, action);
  std::vector<double> grad(plus.size());
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = (plus[i] - minus[i]) / (2.0 * h);
  return grad;
}

void Environment::set_params(const DynamicsParams& params) {
  if (!(params.multiplier > 0.0) || !(params.mass_multiplier > 0.0)) {
    throw std::invalid_argument("dynamics multipliers must be positive");
  }
  params_ = params;
}

void Environment::set_state(const EnvState& state) {
  if (state.domain != domain()) throw std::invalid_argument("state belongs to another domain");
  state_ = state;
  finished_ = is_terminal(state_) || state_.step_count >= episode_limit();
}

// ---------------------------------------------------------------------------
// Pendulum

EnvState Pendulum::make_state(double theta, double theta_dot) {
  EnvState s;
  s.domain = Domain::kPendulum;
  s.q = {theta, theta_dot, 0.0, 0.0};
  return s;
}

EnvState Pendulum::initial_state(Rng& rng) const {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> speed(-1.0, 1.0);
  const double theta = angle(rng);
  return make_state(theta, speed(rng));
}

Observation Pendulum::observe(const EnvState& state) const {
  return {std::cos(state.q[0]), std::sin(state.q[0]), state.q[1]};
}

EnvState Pendulum::advance(const EnvState& state, const DynamicsParams& params,
                           std::span<const double> action) const {
  const double u = kMaxTorque * action_component(action);
  const double l = kLength * params.multiplier;
  const double m = kMass * params.mass_multiplier;
  const double theta = state.q[0];
  const double accel = 3.0 * kGravity / (2.0 * l) * std::sin(theta) + 3.0 / (m * l * l) * u;
  const double theta_dot = std::clamp(state.q[1] + accel * kDt, -kMaxSpeed, kMaxSpeed);
  EnvState next = state;
  next.q[0] = theta + theta_dot * kDt;
  next.q[1] = theta_dot;
  next.step_count = state.step_count + 1;
  return next;
}

double Pendulum::reward(const EnvState& state, std::span<const double> action) const {
  const double u = kMaxTorque * action_component(action);
  const double th = wrap_angle(state.q[0]);
  const double thdot = state.q[1];
  return -(th * th + 0.1 * thdot * thdot + 0.001 * u * u);
}

// ---------------------------------------------------------------------------
// CartPole

EnvState CartPole::make_state(double x, double x_dot, double theta, double theta_dot) {
  EnvState s;
  s.domain = Domain::kCartPole;
  s.q = {x, x_dot, theta, theta_dot};
  return s;
}

EnvState CartPole::initial_state(Rng& rng) const {
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  EnvState s;
  s.domain = Domain::kCartPole;
  for (double& v : s.q) v = dist(rng);
  return s;
}

Observation CartPole::observe(const EnvState& state) const {
  return {state.q[0], state.q[1], state.q[2], state.q[3]};
}

EnvState CartPole::advance(const EnvState& state, const DynamicsParams& params,
                           std::span<const double> action) const {
  const double force = kForceScale * action_component(action);
  const double pole_mass = kPoleMass * params.mass_multiplier;
  const double total_mass = kCartMass + pole_mass;
  const double length = kHalfLength * params.multiplier;
  const double pole_mass_length = pole_mass * length;

  const auto [x, x_dot, theta, theta_dot] = state.q;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double temp = (force + pole_mass_length * theta_dot * theta_dot * sin_t) / total_mass;
  const double theta_acc = (kGravity * sin_t - cos_t * temp) /
                           (length * (4.0 / 3.0 - pole_mass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

  EnvState next = state;
  next.q = {x + kDt * x_dot, x_dot + kDt * x_acc, theta + kDt * theta_dot, theta_dot + kDt * theta_acc};
  next.step_count = state.step_count + 1;
  return next;
}

bool CartPole::is_terminal(const EnvState& state) const {
  return std::abs(state.q[0]) > kXThreshold || std::abs(state.q[2]) > kThetaThreshold;
}

std::vector<double> CartPole::param_gradient(const EnvState&, const DynamicsParams&,
                                             std::span<const double>, double) const {
  throw GradientUnavailable(domain_id(domain()));
}

std::unique_ptr<Environment> make_env(Domain domain) {
  if (domain == Domain::kPendulum) return std::make_unique<Pendulum>();
  return std::make_unique<CartPole>();
}

}  // namespace rsac::envs
