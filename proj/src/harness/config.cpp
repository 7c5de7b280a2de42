#include "rsac/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <array>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rsac::harness {

std::string_view algo_id(Algo algo) {
  switch (algo) {
    case Algo::kSac: return "sac";
    case Algo::kSacAo: return "sac-ao";
    case Algo::kSacAe: return "sac-ae";
    case Algo::kRsacAe: return "rsac-ae";
  }
  return "sac";
}

Algo parse_algo(std::string_view id) {
  for (Algo a : {Algo::kSac, Algo::kSacAo, Algo::kSacAe, Algo::kRsacAe}) {
    if (algo_id(a) == id) return a;
  }
  throw std::invalid_argument("unknown algo '" + std::string(id) + "'");
}

std::string_view attack_mode_id(AttackMode mode) {
  switch (mode) {
    case AttackMode::kAuto: return "auto";
    case AttackMode::kNone: return "none";
    case AttackMode::kAdversarial: return "adversarial";
    case AttackMode::kRandom: return "random";
  }
  return "auto";
}

AttackMode parse_attack_mode(std::string_view id) {
  for (AttackMode m : {AttackMode::kAuto, AttackMode::kNone, AttackMode::kAdversarial, AttackMode::kRandom}) {
    if (attack_mode_id(m) == id) return m;
  }
  throw std::invalid_argument("unknown attack mode '" + std::string(id) + "'");
}

long default_steps(envs::Domain domain) { return domain == envs::Domain::kPendulum ? 60'000 : 100'000; }

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad number '" + std::string(s) + "'");
  }
  return v;
}

long parse_long(std::string_view s) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad integer '" + std::string(s) + "'");
  }
  return v;
}

namespace {

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad seed '" + std::string(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("bad boolean '" + std::string(s) + "'");
}

int parse_int(std::string_view s) { return static_cast<int>(parse_long(s)); }

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

#define RSAC_DOUBLE(name) \
  {#name, {[](const RunConfig& c) { return format_double(c.name); }, [](RunConfig& c, std::string_view v) { c.name = parse_double(v); }}}
#define RSAC_INT(name) \
  {#name, {[](const RunConfig& c) { return std::to_string(c.name); }, [](RunConfig& c, std::string_view v) { c.name = parse_int(v); }}}
#define RSAC_LONG(name) \
  {#name, {[](const RunConfig& c) { return std::to_string(c.name); }, [](RunConfig& c, std::string_view v) { c.name = parse_long(v); }}}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"algo", {[](const RunConfig& c) { return std::string(algo_id(c.algo)); },
                [](RunConfig& c, std::string_view v) { c.algo = parse_algo(v); }}},
      {"env", {[](const RunConfig& c) { return std::string(envs::domain_id(c.env)); },
               [](RunConfig& c, std::string_view v) { c.env = envs::parse_domain(v); }}},
      {"seed", {[](const RunConfig& c) { return std::to_string(c.seed); },
                [](RunConfig& c, std::string_view v) { c.seed = parse_u64(v); }}},
      RSAC_LONG(total_steps),
      {"attack", {[](const RunConfig& c) { return std::string(attack_mode_id(c.attack)); },
                  [](RunConfig& c, std::string_view v) { c.attack = parse_attack_mode(v); }}},
      {"attack_variant", {[](const RunConfig& c) { return std::string(adversary::variant_id(c.attack_variant)); },
                          [](RunConfig& c, std::string_view v) { c.attack_variant = adversary::parse_variant(v); }}},
      RSAC_DOUBLE(nominal_multiplier),
      RSAC_DOUBLE(lr),
      RSAC_INT(batch_size),
      RSAC_DOUBLE(gamma),
      RSAC_DOUBLE(tau),
      RSAC_DOUBLE(alpha),
      RSAC_INT(l_max),
      RSAC_LONG(buffer_capacity),
      RSAC_LONG(warmup),
      RSAC_INT(train_freq),
      RSAC_INT(target_update_interval),
      RSAC_INT(gradient_steps),
      RSAC_DOUBLE(sigma_th),
      RSAC_INT(t_th),
      RSAC_INT(attack_n),
      RSAC_DOUBLE(attack_lambda),
      RSAC_DOUBLE(omega_lo),
      RSAC_DOUBLE(omega_hi),
      RSAC_INT(random_period),
      RSAC_DOUBLE(sacao_beta),
      RSAC_INT(sacao_n),
      RSAC_DOUBLE(clean_fraction),
      RSAC_DOUBLE(checkpoint_fraction),
      RSAC_INT(final_eval_episodes),
      {"trace", {[](const RunConfig& c) { return std::string(c.trace ? "true" : "false"); },
                 [](RunConfig& c, std::string_view v) { c.trace = parse_bool(v); }}},
      {"out_dir", {[](const RunConfig& c) { return c.out_dir.generic_string(); },
                   [](RunConfig& c, std::string_view v) { c.out_dir = std::string(v); }}},
  };
  return table;
}

#undef RSAC_DOUBLE
#undef RSAC_INT
#undef RSAC_LONG

const Field& field(std::string_view key) {
  for (const auto& [k, f] : fields()) {
    if (k == key) return f;
  }
  throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> list = [] {
    std::vector<std::string> out;
    for (const auto& kv : fields()) out.push_back(kv.first);
    return out;
  }();
  return list;
}

std::string RunConfig::get(std::string_view key) const { return field(key).get(*this); }
void RunConfig::set(std::string_view key, std::string_view value) { field(key).set(*this, trim(value)); }

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& [k, f] : fields()) out += k + " = " + f.get(*this) + "\n";
  return out;
}

RunConfig RunConfig::from_text(std::string_view text) {
  RunConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": expected 'key = value'");
    }
    c.set(trim(body.substr(0, eq)), body.substr(eq + 1));
  }
  return c;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

RunConfig RunConfig::resolved() const {
  RunConfig c = *this;
  if (c.total_steps == 0) c.total_steps = default_steps(c.env);
  if (c.attack == AttackMode::kAuto) {
    c.attack = (c.algo == Algo::kSacAe || c.algo == Algo::kRsacAe) ? AttackMode::kAdversarial : AttackMode::kNone;
  }
  if (!c.recurrent()) c.l_max = 0;
  return c;
}

void RunConfig::validate() const {
  if (total_steps <= 0) throw std::invalid_argument("total_steps must be positive after resolution");
  if (attack == AttackMode::kAuto) throw std::invalid_argument("attack mode is unresolved");
  if (nominal_multiplier <= 0.0) throw std::invalid_argument("nominal_multiplier must be positive");
  if (lr <= 0.0 || batch_size < 1 || gamma < 0.0 || gamma > 1.0 || tau < 0.0 || tau > 1.0 || alpha < 0.0) {
    throw std::invalid_argument("invalid SAC hyperparameters");
  }
  if (l_max < 0 || buffer_capacity < batch_size || warmup < batch_size) {
    throw std::invalid_argument("invalid history or buffer settings");
  }
  if (train_freq != 1 || target_update_interval != 1 || gradient_steps != 1) {
    throw std::invalid_argument("only train_freq = target_update_interval = gradient_steps = 1 is supported");
  }
  if (attack_variant == adversary::Variant::kNone || attack_variant == adversary::Variant::kRandom) {
    throw std::invalid_argument("attack_variant must be sample, gradient or blackbox");
  }
  if (checkpoint_fraction <= 0.0 || checkpoint_fraction > 1.0) {
    throw std::invalid_argument("checkpoint_fraction must lie in (0, 1]");
  }
  if (final_eval_episodes < 0) throw std::invalid_argument("final_eval_episodes must be >= 0");
  if (algo == Algo::kSacAo && attack != AttackMode::kNone) {
    throw std::invalid_argument("sac-ao attacks observations; environment attacks are not combined with it");
  }
  attack_config().validate();
  sacao_config().validate();
}

agents::SacConfig RunConfig::sac_config() const {
  agents::SacConfig s;
  s.arch = recurrent() ? agents::Arch::kRecurrent : agents::Arch::kFlat;
  s.obs_dim = env == envs::Domain::kPendulum ? 3 : 4;
  s.act_dim = 1;
  s.l_max = recurrent() ? l_max : 0;
  s.alpha = alpha;
  s.gamma = gamma;
  s.tau = tau;
  s.lr = lr;
  s.batch_size = batch_size;
  s.buffer_capacity = static_cast<std::size_t>(buffer_capacity);
  return s;
}

adversary::AttackConfig RunConfig::attack_config() const {
  adversary::AttackConfig a;
  a.n = attack_n;
  a.lambda = attack_lambda;
  a.omega_set = {omega_lo, omega_hi};
  a.sigma_th = sigma_th;
  a.t_th = t_th;
  a.variant = attack == AttackMode::kRandom        ? adversary::Variant::kRandom
              : attack == AttackMode::kAdversarial ? attack_variant
                                                   : adversary::Variant::kNone;
  a.random_period = random_period;
  return a;
}

adversary::SacaoConfig RunConfig::sacao_config() const { return {sacao_n, sacao_beta, clean_fraction}; }

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (char ch : stream) words.push_back(static_cast<unsigned char>(ch));
  std::seed_seq seq(words.begin(), words.end());
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace rsac::harness
