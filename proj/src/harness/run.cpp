#include "rsac/harness/run.hpp"
#include "rsac/harness/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rsac::harness {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return format_double(v);
}

std::vector<double> as_double(std::span<const float> v) { return {v.begin(), v.end()}; }

std::string step_name(long step) {
  std::string s = std::to_string(step);
  if (s.size() < 9) s.insert(0, 9 - s.size(), '0');
  return "step_" + s + ".ckpt";
}

struct Mean {
  double sum = 0.0;
  long n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  double value() const { return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n); }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_run_file(const RunRecord& rec, std::string_view status) {
  std::ostringstream out;
  out << "status = " << status << "\n";
  out << "steps = " << rec.steps << "\n";
  out << "updates = " << rec.updates << "\n";
  out << "attack_events = " << rec.attack_events << "\n";
  out << "final_eval_mean = " << (rec.final_eval_mean ? num(*rec.final_eval_mean) : std::string("nan")) << "\n";
  out << "final_checkpoint = " << rec.final_checkpoint.filename().generic_string() << "\n";
  out << "wall_seconds = " << num(rec.wall_seconds) << "\n";
  if (!rec.error.empty()) out << "error = " << rec.error << "\n";
  write_text(rec.dir / "run.txt", out.str());
}

std::vector<std::pair<std::string, std::string>> checkpoint_meta(const RunConfig& c, long step) {
  return {{"l_max", std::to_string(c.recurrent() ? c.l_max : 0)},
          {"algo", std::string(algo_id(c.algo))},
          {"label", run_label(c)},
          {"env", std::string(envs::domain_id(c.env))},
          {"seed", std::to_string(c.seed)},
          {"step", std::to_string(step)},
          {"nominal_multiplier", format_double(c.nominal_multiplier)}};
}

}  // namespace

std::optional<std::string> run_status(const fs::path& dir) {
  std::ifstream in(dir / "run.txt");
  if (!in) return std::nullopt;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("status = ", 0) == 0) return line.substr(9);
  }
  return std::nullopt;
}

RunRecord train(const RunConfig& input) {
  const auto t_start = std::chrono::steady_clock::now();
  const RunConfig cfg = input.resolved();
  cfg.validate();

  RunRecord rec;
  rec.config = cfg;
  rec.dir = cfg.out_dir;
  fs::create_directories(rec.dir / "checkpoints");
  write_text(rec.dir / "config.txt", cfg.to_text());
  fs::remove(rec.dir / "run.txt");

  rec.metrics = rec.dir / "metrics.csv";
  rec.attacks = rec.dir / "attacks.csv";
  std::ofstream metrics(rec.metrics, std::ios::binary);
  std::ofstream attacks(rec.attacks, std::ios::binary);
  std::ofstream trace;
  metrics << "step,episode,return,v_loss,q1_loss,q2_loss,pi_loss,mean_sigma,omega,attacks_total\n";
  attacks << "step,kind,omega_old,omega_new,score,mean_sigma\n";
  if (cfg.trace) {
    rec.trace = rec.dir / "trace.csv";
    trace.open(*rec.trace, std::ios::binary);
    trace << "step,episode,episode_step,history_pairs,omega,mean_sigma\n";
  }

  const agents::SacConfig sac = cfg.sac_config();
  const auto attack_cfg = cfg.attack_config();
  const auto sacao_cfg = cfg.sacao_config();
  nn::Rng init_rng(derive_seed(cfg.seed, "init"));
  agents::SacLearner learner(sac, init_rng, derive_seed(cfg.seed, "replay"));
  agents::ReplayBuffer buffer(sac.buffer_capacity);
  nn::Rng action_rng(derive_seed(cfg.seed, "action"));
  envs::Rng attack_rng(derive_seed(cfg.seed, "attack"));
  envs::Rng reset_rng(derive_seed(cfg.seed, "reset"));

  auto env = envs::make_env(cfg.env);
  const envs::DynamicsParams nominal{cfg.nominal_multiplier, 1.0};
  env->set_params(nominal);
  adversary::AttackState attack;
  attack.omega = nominal;
  attack.omega_prev = nominal;
  attack.config = attack_cfg;

  const long total = cfg.total_steps;
  const long ckpt_period =
      std::max<long>(1, std::lround(static_cast<double>(total) * cfg.checkpoint_fraction));
  const long clean_steps = static_cast<long>(std::floor(sacao_cfg.clean_fraction * static_cast<double>(total)));
  const std::size_t obs_dim = env->obs_dim();
  const std::size_t act_dim = env->act_dim();
  const std::size_t l_max = static_cast<std::size_t>(sac.l_max);

  auto save = [&](const fs::path& path, long step) {
    auto meta = checkpoint_meta(cfg, step);
    nn::write_checkpoint(path, agents::make_checkpoint(learner.nets(), std::move(meta)));
  };

  auto log_attack = [&](const adversary::AttackEvent& e) {
    attacks << e.step << ',' << e.kind << ',' << num(e.omega_old) << ',' << num(e.omega_new) << ',' << num(e.score)
            << ',' << num(e.mean_sigma) << '\n';
    ++rec.attack_events;
  };

  long t = 0;
  long episode = 0;
  try {
    while (t < total) {
      const auto obs0 = env->reset(reset_rng());
      agents::History h(obs_dim, act_dim, l_max, obs0);
      double ep_return = 0.0;
      Mean v_loss, q1_loss, q2_loss, pi_loss, sigma;
      int ep_step = 0;

      while (true) {
        agents::PolicyOutput out;
        if (cfg.algo == Algo::kSacAo && t >= clean_steps) {
          const auto cur = as_double(h.current());
          const auto adv = adversary::obs_attack_sacao(cur, learner.nets(), sacao_cfg, attack_rng);
          out = agents::select_action(learner.nets().policy, agents::History(obs_dim, act_dim, 0, adv.observation),
                                      agents::ActionMode::kSample, action_rng);
          log_attack({t, "sacao", attack.omega.multiplier, attack.omega.multiplier, adv.q_min, out.mean_sigma()});
        } else {
          out = agents::select_action(learner.nets().policy, h, agents::ActionMode::kSample, action_rng);
        }
        for (double a : out.action) {
          if (!std::isfinite(a)) throw nn::DivergenceError("non-finite action at step " + std::to_string(t));
        }
        sigma.add(out.mean_sigma());

        if (attack_cfg.variant == adversary::Variant::kRandom) {
          if (auto next = adversary::random_attack(attack, t, attack_rng)) {
            const double old = attack.omega.multiplier;
            attack.install(*next, t);
            env->set_params(attack.omega);
            log_attack({t, "random", old, next->multiplier, std::numeric_limits<double>::quiet_NaN(),
                        out.mean_sigma()});
          }
        } else if (attack_cfg.variant != adversary::Variant::kNone &&
                   adversary::attack_gate(out.sigma_pre, t, attack)) {
          adversary::AttackResult res;
          adversary::Variant used = attack_cfg.variant;
          if (used == adversary::Variant::kGradient) {
            try {
              res = adversary::env_attack_gradient(*env, env->state(), out.action, attack);
            } catch (const envs::GradientUnavailable&) {
              used = adversary::Variant::kSample;
            }
          }
          if (used == adversary::Variant::kSample) {
            res = adversary::env_attack_sample(*env, env->state(), out.action, attack, attack_rng);
          } else if (used == adversary::Variant::kBlackbox) {
            res = adversary::env_attack_blackbox(attack, attack_rng);
          }
          const double old = attack.omega.multiplier;
          attack.install(res.omega, t);
          env->set_params(attack.omega);
          log_attack({t, std::string(adversary::variant_id(used)), old, res.omega.multiplier, res.score,
                      out.mean_sigma()});
        }

        const auto step = env->step(out.action);
        ep_return += step.reward;
        agents::History h_next = h;
        h_next.push(out.action, step.observation);
        if (trace.is_open()) {
          trace << t << ',' << episode << ',' << ep_step << ',' << h.pair_count() << ','
                << num(attack.omega.multiplier) << ',' << num(out.mean_sigma()) << '\n';
        }
        agents::TransitionH tr;
        tr.h = h;
        tr.action.assign(out.action.begin(), out.action.end());
        tr.h_next = h_next;
        tr.reward = static_cast<float>(step.reward);
        tr.done = step.terminated;
        buffer.add(std::move(tr));
        h = std::move(h_next);
        ++t;
        ++ep_step;

        if (static_cast<long>(buffer.size()) >= cfg.warmup) {
          const auto report = learner.update(buffer);
          if (!report.skipped) {
            v_loss.add(report.v_loss);
            q1_loss.add(report.q1_loss);
            q2_loss.add(report.q2_loss);
            pi_loss.add(report.pi_loss);
          }
        }
        rec.steps = t;
        rec.updates = learner.updates();

        if (t % ckpt_period == 0 || t == total) {
          const auto path = rec.dir / "checkpoints" / step_name(t);
          save(path, t);
          rec.checkpoints.push_back(path);
        }
        if (step.done || t >= total) break;
      }

      metrics << t << ',' << episode << ',' << num(ep_return) << ',' << num(v_loss.value()) << ','
              << num(q1_loss.value()) << ',' << num(q2_loss.value()) << ',' << num(pi_loss.value()) << ','
              << num(sigma.value()) << ',' << num(attack.omega.multiplier) << ',' << rec.attack_events << '\n';
      ++episode;
    }
  } catch (const nn::DivergenceError& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  metrics.flush();
  attacks.flush();
  if (trace.is_open()) trace.flush();

  rec.final_checkpoint = rec.dir / "final.ckpt";
  save(rec.final_checkpoint, t);
  if (!rec.failed && cfg.final_eval_episodes > 0) {
    EvalOptions opt;
    opt.multipliers = {cfg.nominal_multiplier};
    opt.episodes = cfg.final_eval_episodes;
    opt.seed = derive_seed(cfg.seed, "final-eval");
    const auto report = evaluate_nets(learner.nets(), sac.l_max, algo_id(cfg.algo), cfg.env, opt);
    rec.final_eval_mean = report.summary().front().mean;
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  write_run_file(rec, rec.failed ? "failed" : "completed");
  return rec;
}

std::vector<EvalSummary> EvalReport::summary() const {
  std::vector<EvalSummary> out;
  std::vector<std::vector<double>> values;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const EvalSummary& s) { return s.multiplier == r.multiplier; });
    if (it == out.end()) {
      out.push_back({r.multiplier, 0.0, 0.0, 0});
      values.emplace_back();
      it = out.end() - 1;
    }
    values[static_cast<std::size_t>(it - out.begin())].push_back(r.ret);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& v = values[i];
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out[i].mean = mean;
    out[i].std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    out[i].n = static_cast<int>(v.size());
  }
  return out;
}

std::vector<double> parse_grid(std::string_view spec) {
  const auto a = spec.find(':');
  const auto b = spec.find(':', a == std::string_view::npos ? a : a + 1);
  if (a == std::string_view::npos || b == std::string_view::npos) {
    throw std::invalid_argument("grid must be LO:HI:STEP");
  }
  const double lo = parse_double(spec.substr(0, a));
  const double hi = parse_double(spec.substr(a + 1, b - a - 1));
  const double step = parse_double(spec.substr(b + 1));
  if (!(step > 0.0) || hi < lo || lo <= 0.0) throw std::invalid_argument("grid needs 0 < LO <= HI and STEP > 0");
  std::vector<double> out;
  const long count = std::lround(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (long i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

EvalReport evaluate_nets(const agents::AgentNets<float>& nets, int l_max, std::string_view algo,
                         envs::Domain domain, const EvalOptions& options) {
  if (options.episodes < 1) throw std::invalid_argument("evaluation needs at least one episode");
  if (options.multipliers.empty()) throw std::invalid_argument("evaluation needs at least one multiplier");
  auto env = envs::make_env(domain);
  if (static_cast<std::size_t>(nets.policy.spec().obs_dim) != env->obs_dim() ||
      static_cast<std::size_t>(nets.policy.spec().act_dim) != env->act_dim()) {
    throw nn::ShapeError("checkpoint dimensions do not match domain '" + std::string(envs::domain_id(domain)) + "'");
  }
  const std::size_t hist = nets.arch() == agents::Arch::kRecurrent ? static_cast<std::size_t>(l_max) : 0;
  EvalReport report;
  nn::Rng unused(0);
  for (double m : options.multipliers) {
    env->set_params({m, 1.0});
    for (int e = 0; e < options.episodes; ++e) {
      const auto obs0 = env->reset(derive_seed(options.seed, "eval-episode-" + std::to_string(e)));
      agents::History h(env->obs_dim(), env->act_dim(), hist, obs0);
      double ret = 0.0;
      int steps = 0;
      while (true) {
        const auto out = agents::select_action(nets.policy, h, agents::ActionMode::kMean, unused);
        const auto s = env->step(out.action);
        ret += s.reward;
        ++steps;
        if (s.done) break;
        h.push(out.action, s.observation);
      }
      report.rows.push_back({std::string(algo), std::string(envs::domain_id(domain)), m, e, ret, steps});
    }
  }
  return report;
}

EvalReport evaluate(const fs::path& checkpoint, envs::Domain domain, const EvalOptions& options) {
  const auto ckpt = nn::read_checkpoint(checkpoint);
  const auto config = agents::config_from_checkpoint(ckpt);
  const auto nets = agents::load_nets(ckpt, config);
  const std::string algo = ckpt.has_meta("label")  ? ckpt.meta("label")
                           : ckpt.has_meta("algo") ? ckpt.meta("algo")
                                                   : std::string(agents::arch_id(config.arch));
  return evaluate_nets(nets, config.l_max, algo, domain, options);
}

void write_eval_csv(const EvalReport& report, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "algo,env,multiplier,episode,return,steps\n";
  for (const auto& r : report.rows) {
    out << r.algo << ',' << r.env << ',' << num(r.multiplier) << ',' << r.episode << ',' << num(r.ret) << ','
        << r.steps << '\n';
  }
}

EvalReport read_eval_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "algo,env,multiplier,episode,return,steps") {
    throw std::runtime_error(path.string() + ": unexpected evaluation header");
  }
  EvalReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
    report.rows.push_back({cells[0], cells[1], parse_double(cells[2]), static_cast<int>(parse_long(cells[3])),
                           parse_double(cells[4]), static_cast<int>(parse_long(cells[5]))});
  }
  return report;
}

}  // namespace rsac::harness
