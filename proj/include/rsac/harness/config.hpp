#pragma once

#include "rsac/adversary/attack.hpp"
#include "rsac/agents/sac.hpp"
#include "rsac/envs/environment.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace rsac::harness {

enum class Algo { kSac, kSacAo, kSacAe, kRsacAe };

std::string_view algo_id(Algo algo);
Algo parse_algo(std::string_view id);

/// Environment attack mode. `kAuto` resolves to adversarial for sac-ae and
/// rsac-ae and to none otherwise.
enum class AttackMode { kAuto, kNone, kAdversarial, kRandom };

std::string_view attack_mode_id(AttackMode mode);
AttackMode parse_attack_mode(std::string_view id);

/// One training run. Text form is `key = value` per line, in the order of
/// `keys()`.
struct RunConfig {
  Algo algo = Algo::kRsacAe;
  envs::Domain env = envs::Domain::kPendulum;
  std::uint64_t seed = 0;
  /// 0 selects the domain default (Pendulum 60k, CartPole 100k).
  long total_steps = 0;
  AttackMode attack = AttackMode::kAuto;
  /// Adversarial variant: sample, gradient or blackbox.
  adversary::Variant attack_variant = adversary::Variant::kSample;
  /// Nominal length multiplier of the training environment.
  double nominal_multiplier = 1.0;

  double lr = 3e-4;
  int batch_size = 64;
  double gamma = 0.99;
  double tau = 0.005;
  double alpha = 0.2;
  int l_max = 10;
  long buffer_capacity = 50'000;
  long warmup = 1000;
  int train_freq = 1;
  int target_update_interval = 1;
  int gradient_steps = 1;

  double sigma_th = 0.2;
  int t_th = 40;
  int attack_n = 20;
  double attack_lambda = 0.1;
  double omega_lo = 0.67;
  double omega_hi = 1.5;
  int random_period = 100;

  double sacao_beta = 0.1;
  int sacao_n = 20;
  double clean_fraction = 0.5;

  /// Fraction of total steps between checkpoints.
  double checkpoint_fraction = 0.1;
  int final_eval_episodes = 20;
  /// Write a per-step trace.csv.
  bool trace = false;
  std::filesystem::path out_dir = "runs/default";

  /// Fills the domain-dependent defaults and the automatic attack mode.
  RunConfig resolved() const;
  void validate() const;

  agents::SacConfig sac_config() const;
  adversary::AttackConfig attack_config() const;
  adversary::SacaoConfig sacao_config() const;
  bool recurrent() const { return algo == Algo::kRsacAe; }

  static const std::vector<std::string>& keys();
  std::string get(std::string_view key) const;
  void set(std::string_view key, std::string_view value);

  std::string to_text() const;
  static RunConfig from_text(std::string_view text);
  static RunConfig from_file(const std::filesystem::path& path);
};

long default_steps(envs::Domain domain);

/// Shortest text that reads back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);
long parse_long(std::string_view s);

/// Independent seed for a named stream of a run.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

}  // namespace rsac::harness
