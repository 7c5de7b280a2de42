#include "rsac/agents/sac.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rsac::agents {

std::string_view arch_id(Arch arch) { return arch == Arch::kFlat ? "flat" : "recurrent"; }

Arch parse_arch(std::string_view id) {
  if (id == "flat") return Arch::kFlat;
  if (id == "recurrent") return Arch::kRecurrent;
  throw std::invalid_argument("unknown architecture '" + std::string(id) + "'");
}

double PolicyOutput::mean_sigma() const {
  if (sigma_pre.empty()) return 0.0;
  return std::accumulate(sigma_pre.begin(), sigma_pre.end(), 0.0) / static_cast<double>(sigma_pre.size());
}

template <class T>
AgentNets<T> AgentNets<T>::create(const SacConfig& config, nn::Rng& rng) {
  AgentNets nets;
  const NetSpec base{config.arch, Role::kPolicy, config.obs_dim, config.act_dim, config.widths};
  auto spec = [&](Role role) {
    NetSpec s = base;
    s.role = role;
    return s;
  };
  nets.policy = Network<T>(spec(Role::kPolicy), "policy/", rng);
  nets.q1 = Network<T>(spec(Role::kQ), "q1/", rng);
  nets.q2 = Network<T>(spec(Role::kQ), "q2/", rng);
  nets.v = Network<T>(spec(Role::kV), "v/", rng);
  nets.v_target = nets.v;
  for (auto& p : nets.v_target.params()) p.name = "v_target/" + p.name.substr(2);
  nets.alpha = static_cast<T>(config.alpha);
  nets.gamma = static_cast<T>(config.gamma);
  return nets;
}

template <class T>
TrainingBatch<T> make_training_batch(std::span<const TransitionH* const> transitions, Arch arch) {
  if (transitions.empty()) throw std::invalid_argument("empty training batch");
  std::vector<const History*> h, h_next;
  h.reserve(transitions.size());
  h_next.reserve(transitions.size());
  for (const TransitionH* t : transitions) {
    h.push_back(&t->h);
    h_next.push_back(&t->h_next);
  }
  const bool frames = arch == Arch::kRecurrent;
  TrainingBatch<T> batch;
  batch.h = make_history_batch<T>(h, frames);
  batch.h_next = make_history_batch<T>(h_next, frames);
  const auto n = static_cast<Eigen::Index>(transitions.size());
  const auto act_dim = static_cast<Eigen::Index>(transitions.front()->action.size());
  batch.actions.resize(n, act_dim);
  batch.rewards.resize(n, 1);
  batch.dones.resize(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const TransitionH& t = *transitions[i];
    if (static_cast<Eigen::Index>(t.action.size()) != act_dim) throw nn::ShapeError("action width mismatch");
    for (Eigen::Index j = 0; j < act_dim; ++j) batch.actions(i, j) = static_cast<T>(t.action[j]);
    batch.rewards(i, 0) = static_cast<T>(t.reward);
    batch.dones(i, 0) = t.done ? T(1) : T(0);
  }
  return batch;
}

template <class T>
LossGraph<T> compute_losses(nn::Tape<T>& tape, AgentNets<T>& nets, const TrainingBatch<T>& batch,
                            const nn::Mat<T>& noise) {
  using Var = typename nn::Tape<T>::Var;
  const bool recurrent = nets.arch() == Arch::kRecurrent;

  auto pol = nets.policy.bind(tape, true);
  auto q1_p = nets.q1.bind(tape, true);
  auto q2_p = nets.q2.bind(tape, true);
  auto q1_frozen = nets.q1.bind(tape, false);
  auto q2_frozen = nets.q2.bind(tape, false);
  auto v_p = nets.v.bind(tape, true);
  auto v_target_p = nets.v_target.bind(tape, false);

  const auto head = nets.policy.policy(tape, pol, batch.h);
  const auto fresh = nn::sample_squashed(tape, head.mean, head.log_std, noise);

  std::optional<Var> f1, f2, f1_detached, f2_detached;
  if (recurrent) {
    f1 = nets.q1.encode_history(tape, q1_p, batch.h);
    f2 = nets.q2.encode_history(tape, q2_p, batch.h);
    f1_detached = tape.detach(*f1);
    f2_detached = tape.detach(*f2);
  }
  const Var buffer_action = tape.constant(batch.actions);
  const Var q1 = nets.q1.q_value(tape, q1_p, batch.h, buffer_action, f1);
  const Var q2 = nets.q2.q_value(tape, q2_p, batch.h, buffer_action, f2);
  const Var q1_fresh = nets.q1.q_value(tape, q1_frozen, batch.h, fresh.action, f1_detached);
  const Var q2_fresh = nets.q2.q_value(tape, q2_frozen, batch.h, fresh.action, f2_detached);
  const Var min_q = tape.minimum(q1_fresh, q2_fresh);

  const T alpha = nets.alpha;
  auto half_mse = [&](Var pred, const nn::Mat<T>& target) {
    return tape.scale(tape.mean(tape.square(tape.sub(pred, tape.constant(target)))), T(0.5));
  };

  const Var v = nets.v.value(tape, v_p, batch.h);
  const nn::Mat<T> v_target = tape.value(min_q) - alpha * tape.value(fresh.log_prob);
  const Var j_v = half_mse(v, v_target);

  const Var v_next = nets.v_target.value(tape, v_target_p, batch.h_next);
  const nn::Mat<T> q_target =
      batch.rewards + nets.gamma * (nn::Mat<T>::Ones(batch.dones.rows(), 1) - batch.dones).cwiseProduct(tape.value(v_next));
  const Var j_q1 = half_mse(q1, q_target);
  const Var j_q2 = half_mse(q2, q_target);

  const Var j_pi = tape.mean(tape.sub(tape.scale(fresh.log_prob, alpha), min_q));

  LossGraph<T> g;
  g.j_v = j_v;
  g.j_q1 = j_q1;
  g.j_q2 = j_q2;
  g.j_pi = j_pi;
  g.total = tape.add(tape.add(j_v, j_q1), tape.add(j_q2, j_pi));
  g.log_prob = fresh.log_prob;
  g.sigma = fresh.sigma;
  g.min_q_fresh = min_q;
  return g;
}

template <class T>
PolicyOutput select_action(const Network<T>& policy, const History& h, ActionMode mode, nn::Rng& rng) {
  nn::Tape<T> tape;
  auto p = nn::bind_frozen(tape, policy.params());
  const History* hp = &h;
  const auto batch = make_history_batch<T>(std::span<const History* const>(&hp, 1),
                                           policy.spec().arch == Arch::kRecurrent);
  const auto head = policy.policy(tape, p, batch);
  const int d = policy.spec().act_dim;
  nn::Mat<T> noise = nn::Mat<T>::Zero(1, d);
  if (mode == ActionMode::kSample) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int j = 0; j < d; ++j) noise(0, j) = static_cast<T>(normal(rng));
  }
  const auto s = nn::sample_squashed(tape, head.mean, head.log_std, noise);
  PolicyOutput out;
  out.action.resize(d);
  out.sigma_pre.resize(d);
  for (int j = 0; j < d; ++j) {
    out.action[j] = static_cast<double>(tape.value(s.action)(0, j));
    out.sigma_pre[j] = static_cast<double>(tape.value(s.sigma)(0, j));
  }
  if (mode == ActionMode::kSample) out.log_prob = static_cast<double>(tape.scalar(s.log_prob));
  return out;
}

SacLearner::SacLearner(const SacConfig& config, nn::Rng& init_rng, std::uint64_t sample_seed)
    : config_(config), sample_rng_(sample_seed) {
  if (config_.arch == Arch::kFlat) config_.l_max = 0;
  if (config_.batch_size < 1) throw std::invalid_argument("batch size must be positive");
  nets_ = AgentNets<float>::create(config_, init_rng);
  const nn::AdamConfig adam{config_.lr, 0.9, 0.999, 1e-8};
  opt_v_ = nn::Adam<float>(nets_.v.params(), adam);
  opt_q1_ = nn::Adam<float>(nets_.q1.params(), adam);
  opt_q2_ = nn::Adam<float>(nets_.q2.params(), adam);
  opt_pi_ = nn::Adam<float>(nets_.policy.params(), adam);
}

LossReport SacLearner::update(const ReplayBuffer& buffer) {
  LossReport report;
  const auto batch_size = static_cast<std::size_t>(config_.batch_size);
  if (buffer.size() < batch_size) return report;

  const auto indices = buffer.sample_indices(batch_size, sample_rng_);
  std::vector<const TransitionH*> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) picked.push_back(&buffer.at(i));
  const auto batch = make_training_batch<float>(picked, config_.arch);

  nn::Mat<float> noise(static_cast<Eigen::Index>(batch_size), config_.act_dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = static_cast<float>(normal(sample_rng_));

  nn::Tape<float> tape;
  const auto g = compute_losses(tape, nets_, batch, noise);
  report.v_loss = tape.scalar(g.j_v);
  report.q1_loss = tape.scalar(g.j_q1);
  report.q2_loss = tape.scalar(g.j_q2);
  report.pi_loss = tape.scalar(g.j_pi);
  report.mean_sigma = tape.value(g.sigma).mean();
  for (double l : {report.v_loss, report.q1_loss, report.q2_loss, report.pi_loss}) {
    if (!std::isfinite(l)) throw nn::DivergenceError("non-finite loss at update " + std::to_string(updates_));
  }
  tape.backward(g.total);
  opt_v_.step(nets_.v.params());
  opt_q1_.step(nets_.q1.params());
  opt_q2_.step(nets_.q2.params());
  opt_pi_.step(nets_.policy.params());
  nn::soft_update(nets_.v_target.params(), nets_.v.params(), static_cast<float>(config_.tau));
  ++updates_;
  report.skipped = false;
  return report;
}

namespace {

std::string to_text(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

int to_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::runtime_error("bad integer '" + s + "'");
  return v;
}

double to_double(const std::string& s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

}  // namespace

nn::Checkpoint make_checkpoint(const AgentNets<float>& nets,
                               std::vector<std::pair<std::string, std::string>> metadata) {
  nn::Checkpoint ckpt;
  const NetSpec& s = nets.policy.spec();
  ckpt.metadata = {
      {"arch", std::string(arch_id(s.arch))},
      {"obs_dim", std::to_string(s.obs_dim)},
      {"act_dim", std::to_string(s.act_dim)},
      {"fc1", std::to_string(s.widths.fc1)},
      {"gru", std::to_string(s.widths.gru)},
      {"fc2", std::to_string(s.widths.fc2)},
      {"fc3", std::to_string(s.widths.fc3)},
      {"fc4", std::to_string(s.widths.fc4)},
      {"alpha", to_text(nets.alpha)},
      {"gamma", to_text(nets.gamma)},
  };
  for (auto& kv : metadata) ckpt.metadata.push_back(std::move(kv));
  const std::array<const Network<float>*, 5> list{&nets.policy, &nets.q1, &nets.q2, &nets.v, &nets.v_target};
  for (const auto* net : list) {
    for (const auto& p : net->params()) ckpt.tensors.push_back(p);
  }
  return ckpt;
}

SacConfig config_from_checkpoint(const nn::Checkpoint& checkpoint) {
  SacConfig c;
  c.arch = parse_arch(checkpoint.meta("arch"));
  c.obs_dim = to_int(checkpoint.meta("obs_dim"));
  c.act_dim = to_int(checkpoint.meta("act_dim"));
  c.widths.fc1 = to_int(checkpoint.meta("fc1"));
  c.widths.gru = to_int(checkpoint.meta("gru"));
  c.widths.fc2 = to_int(checkpoint.meta("fc2"));
  c.widths.fc3 = to_int(checkpoint.meta("fc3"));
  c.widths.fc4 = to_int(checkpoint.meta("fc4"));
  c.alpha = to_double(checkpoint.meta("alpha"));
  c.gamma = to_double(checkpoint.meta("gamma"));
  if (checkpoint.has_meta("l_max")) c.l_max = to_int(checkpoint.meta("l_max"));
  if (c.arch == Arch::kFlat) c.l_max = 0;
  return c;
}

AgentNets<float> load_nets(const nn::Checkpoint& checkpoint, const SacConfig& config) {
  nn::Rng rng(0);
  AgentNets<float> nets = AgentNets<float>::create(config, rng);
  std::array<Network<float>*, 5> list{&nets.policy, &nets.q1, &nets.q2, &nets.v, &nets.v_target};
  std::size_t k = 0;
  for (auto* net : list) {
    for (auto& p : net->params()) {
      if (k >= checkpoint.tensors.size()) throw nn::ShapeError("checkpoint has too few tensors");
      const auto& src = checkpoint.tensors[k++];
      if (src.name != p.name || src.rows() != p.rows() || src.cols() != p.cols()) {
        throw nn::ShapeError("checkpoint tensor '" + src.name + "' does not match network parameter '" +
                             p.name + "'");
      }
      p.values = src.values;
    }
  }
  if (k != checkpoint.tensors.size()) throw nn::ShapeError("checkpoint has extra tensors");
  return nets;
}

template struct AgentNets<float>;
template struct AgentNets<double>;
template TrainingBatch<float> make_training_batch<float>(std::span<const TransitionH* const>, Arch);
template TrainingBatch<double> make_training_batch<double>(std::span<const TransitionH* const>, Arch);
template LossGraph<float> compute_losses<float>(nn::Tape<float>&, AgentNets<float>&, const TrainingBatch<float>&,
                                                const nn::Mat<float>&);
template LossGraph<double> compute_losses<double>(nn::Tape<double>&, AgentNets<double>&,
                                                  const TrainingBatch<double>&, const nn::Mat<double>&);
template PolicyOutput select_action<float>(const Network<float>&, const History&, ActionMode, nn::Rng&);
template PolicyOutput select_action<double>(const Network<double>&, const History&, ActionMode, nn::Rng&);

}  // namespace rsac::agents
