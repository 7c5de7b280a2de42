#include "rsac/harness/suite.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace rsac::harness {

namespace fs = std::filesystem;

std::string run_label(const RunConfig& config) {
  const RunConfig c = config.resolved();
  std::string label(algo_id(c.algo));
  if (c.attack == AttackMode::kRandom) label += "-random";
  if (c.nominal_multiplier != 1.0) label += "-l" + format_double(c.nominal_multiplier);
  return label;
}

std::vector<double> modified_default_lengths(envs::Domain domain) {
  return domain == envs::Domain::kPendulum ? std::vector<double>{1.25, 1.5} : std::vector<double>{1.5, 2.0};
}

std::vector<SuiteEntry> plan_suite(const SuiteOptions& options) {
  std::vector<SuiteEntry> plan;
  auto add = [&](RunConfig c) {
    c.total_steps = options.steps;
    c.trace = options.trace;
    const std::string label = run_label(c);
    c.out_dir = options.out_dir / label / std::string(envs::domain_id(c.env)) / ("seed" + std::to_string(c.seed));
    plan.push_back({label, c.resolved()});
  };
  for (envs::Domain env : options.envs) {
    for (std::uint64_t seed : options.seeds) {
      RunConfig base;
      base.env = env;
      base.seed = seed;
      if (options.name == "main") {
        const std::vector<Algo> algos =
            options.algos.empty() ? std::vector<Algo>{Algo::kSac, Algo::kSacAo, Algo::kSacAe, Algo::kRsacAe}
                                  : options.algos;
        for (Algo a : algos) {
          RunConfig c = base;
          c.algo = a;
          add(c);
        }
      } else if (options.name == "modified-default") {
        for (double length : modified_default_lengths(env)) {
          RunConfig c = base;
          c.algo = Algo::kSac;
          c.attack = AttackMode::kNone;
          c.nominal_multiplier = length;
          add(c);
        }
      } else if (options.name == "random-attack") {
        RunConfig c = base;
        c.algo = Algo::kRsacAe;
        c.attack = AttackMode::kRandom;
        add(c);
      } else {
        throw std::invalid_argument("unknown suite '" + options.name + "'");
      }
    }
  }
  return plan;
}

namespace {

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Equal apart from out_dir, so a suite directory reached by another path
// still reuses its runs.
bool same_config(const fs::path& dir, const RunConfig& config) {
  const std::string text = read_all(dir / "config.txt");
  if (text.empty()) return false;
  try {
    RunConfig stored = RunConfig::from_text(text);
    stored.out_dir = config.out_dir;
    return stored.to_text() == config.to_text();
  } catch (const std::invalid_argument&) {
    return false;
  }
}

}  // namespace

std::vector<ComparisonRow> compare(const std::vector<EvalReport>& per_seed_reports) {
  using Key = std::tuple<std::string, std::string, double>;
  std::map<Key, std::vector<double>> seed_means;
  std::vector<Key> order;
  for (const auto& report : per_seed_reports) {
    std::map<Key, std::pair<double, int>> acc;
    for (const auto& r : report.rows) {
      auto& a = acc[{r.algo, r.env, r.multiplier}];
      a.first += r.ret;
      a.second += 1;
    }
    for (const auto& r : report.rows) {
      const Key k{r.algo, r.env, r.multiplier};
      auto it = acc.find(k);
      if (it == acc.end()) continue;
      if (!seed_means.contains(k)) order.push_back(k);
      seed_means[k].push_back(it->second.first / it->second.second);
      acc.erase(it);
    }
  }
  std::vector<ComparisonRow> rows;
  for (const auto& k : order) {
    const auto& v = seed_means[k];
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    rows.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), static_cast<int>(v.size()), mean,
                    v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0});
  }
  return rows;
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "label,env,multiplier,seeds,mean,std\n";
  for (const auto& r : rows) {
    out << r.label << ',' << r.env << ',' << format_double(r.multiplier) << ',' << r.seeds << ','
        << format_double(r.mean) << ',' << format_double(r.std) << '\n';
  }
}

SuiteResult run_experiment_suite(const SuiteOptions& options) {
  SuiteResult result;
  std::vector<EvalReport> reports;
  for (const auto& entry : plan_suite(options)) {
    SuiteRunResult run;
    run.entry = entry;
    const fs::path dir = entry.config.out_dir;
    run.eval_csv = dir / "eval.csv";
    const bool cached = same_config(dir, entry.config) && run_status(dir).value_or("") == "completed" &&
                        fs::exists(dir / "final.ckpt");
    if (cached) {
      run.reused = true;
      run.record.config = entry.config;
      run.record.dir = dir;
      run.record.final_checkpoint = dir / "final.ckpt";
      if (options.log) options.log("reuse " + dir.generic_string());
    } else {
      if (options.log) options.log("train " + dir.generic_string());
      run.record = train(entry.config);
      if (run.record.failed) throw std::runtime_error("run " + dir.generic_string() + " failed: " + run.record.error);
      fs::remove(run.eval_csv);
    }
    std::string eval_key = "episodes = " + std::to_string(options.eval.episodes) +
                           "\nseed = " + std::to_string(options.eval.seed) + "\nmultipliers =";
    for (double m : options.eval.multipliers) eval_key += " " + format_double(m);
    eval_key += "\n";
    EvalReport report;
    if (fs::exists(run.eval_csv) && read_all(dir / "eval.key") == eval_key) {
      report = read_eval_csv(run.eval_csv);
    } else {
      const auto ckpt = nn::read_checkpoint(run.record.final_checkpoint);
      const auto sac = agents::config_from_checkpoint(ckpt);
      const auto nets = agents::load_nets(ckpt, sac);
      EvalOptions eval = options.eval;
      eval.seed = derive_seed(options.eval.seed, "suite-eval");
      report = evaluate_nets(nets, sac.l_max, entry.label, entry.config.env, eval);
      write_eval_csv(report, run.eval_csv);
      std::ofstream(dir / "eval.key", std::ios::binary) << eval_key;
    }
    reports.push_back(std::move(report));
    result.runs.push_back(std::move(run));
  }
  result.comparison = compare(reports);
  result.comparison_csv = options.out_dir / ("comparison-" + options.name + ".csv");
  write_comparison_csv(result.comparison, result.comparison_csv);
  return result;
}

}  // namespace rsac::harness
