// Command-line front end: train, eval, suite, plot.

#include "rsac/harness/plot.hpp"
#include "rsac/harness/suite.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace rsac;

namespace {

int run_train(const std::string& config_file, const std::vector<std::pair<std::string, std::string>>& flags,
              const std::vector<std::string>& sets) {
  harness::RunConfig cfg = config_file.empty() ? harness::RunConfig{} : harness::RunConfig::from_file(config_file);
  for (const auto& [k, v] : flags) cfg.set(k, v);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  const auto rec = harness::train(cfg);
  std::cout << "run " << rec.dir.generic_string() << ": " << (rec.failed ? "failed" : "completed") << ", "
            << rec.steps << " steps, " << rec.updates << " updates, " << rec.attack_events << " attack events";
  if (rec.final_eval_mean) std::cout << ", nominal eval mean " << *rec.final_eval_mean;
  std::cout << "\n";
  if (rec.failed) {
    std::cerr << "error: " << rec.error << "\n";
    return 2;
  }
  return 0;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto part = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!part.empty()) out.push_back(static_cast<std::uint64_t>(harness::parse_long(part)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("no seeds given");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recurrent SAC with adversarial dynamics: training and robustness evaluation"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "Train one agent");
  std::string config_file;
  std::string algo, env, seed, steps, attack, variant, nominal, out_dir;
  bool trace = false;
  std::vector<std::string> sets;
  train->add_option("--config", config_file, "key = value config file; flags override it");
  train->add_option("--algo", algo, "sac | sac-ao | sac-ae | rsac-ae");
  train->add_option("--env", env, "pendulum | cartpole");
  train->add_option("--seed", seed, "Run seed");
  train->add_option("--steps", steps, "Total environment steps (0 = domain default)");
  train->add_option("--attack", attack, "adversarial | random | none | auto");
  train->add_option("--variant", variant, "Adversarial variant: sample | gradient | blackbox");
  train->add_option("--nominal", nominal, "Nominal length multiplier of the training environment");
  train->add_flag("--trace", trace, "Write a per-step trace.csv");
  train->add_option("--set", sets, "Override any config key: key=value");
  train->add_option("--out", out_dir, "Run directory");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint over a multiplier grid");
  std::string checkpoint, eval_env = "pendulum", grid = "0.5:2.0:0.25", eval_out = "eval.csv";
  int episodes = 20;
  std::uint64_t eval_seed = 0;
  eval->add_option("--checkpoint", checkpoint, "Checkpoint manifest")->required();
  eval->add_option("--env", eval_env, "pendulum | cartpole");
  eval->add_option("--multipliers", grid, "LO:HI:STEP");
  eval->add_option("--episodes", episodes, "Episodes per multiplier");
  eval->add_option("--seed", eval_seed, "Evaluation seed");
  eval->add_option("--out", eval_out, "Output CSV");

  auto* suite = app.add_subcommand("suite", "Run an experiment suite");
  std::string suite_name = "main", suite_out = "runs/suite", seeds = "0,1,2,3,4";
  std::vector<std::string> suite_envs, suite_algos;
  long suite_steps = 0;
  int suite_episodes = 20;
  suite->add_option("--name", suite_name, "main | modified-default | random-attack");
  suite->add_option("--out", suite_out, "Suite directory");
  suite->add_option("--seeds", seeds, "Comma-separated seeds");
  suite->add_option("--env", suite_envs, "Domains (repeatable; default both)");
  suite->add_option("--algo", suite_algos, "Restrict the main suite to these algos (repeatable)");
  suite->add_option("--steps", suite_steps, "Override total steps (0 = domain default)");
  suite->add_option("--episodes", suite_episodes, "Evaluation episodes per multiplier");

  auto* plot = app.add_subcommand("plot", "Plot evaluation CSVs as SVG");
  std::vector<std::string> inputs;
  std::string plot_out = "plot.svg", title = "Return vs. length multiplier";
  plot->add_option("--in", inputs, "Evaluation CSVs")->required();
  plot->add_option("--out", plot_out, "Output SVG");
  plot->add_option("--title", title, "Plot title");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      std::vector<std::pair<std::string, std::string>> flags;
      auto put = [&](const char* key, const std::string& v) {
        if (!v.empty()) flags.emplace_back(key, v);
      };
      put("algo", algo);
      put("env", env);
      put("seed", seed);
      put("total_steps", steps);
      put("attack", attack);
      put("attack_variant", variant);
      put("nominal_multiplier", nominal);
      put("out_dir", out_dir);
      if (trace) flags.emplace_back("trace", "true");
      return run_train(config_file, flags, sets);
    }
    if (*eval) {
      harness::EvalOptions opt;
      opt.multipliers = harness::parse_grid(grid);
      opt.episodes = episodes;
      opt.seed = eval_seed;
      const auto report = harness::evaluate(checkpoint, envs::parse_domain(eval_env), opt);
      harness::write_eval_csv(report, eval_out);
      for (const auto& s : report.summary()) {
        std::cout << "multiplier " << s.multiplier << ": mean " << s.mean << ", std " << s.std << ", n " << s.n
                  << "\n";
      }
      return 0;
    }
    if (*suite) {
      harness::SuiteOptions opt;
      opt.name = suite_name;
      opt.out_dir = suite_out;
      opt.seeds = parse_seeds(seeds);
      if (!suite_envs.empty()) {
        opt.envs.clear();
        for (const auto& e : suite_envs) opt.envs.push_back(envs::parse_domain(e));
      }
      for (const auto& a : suite_algos) opt.algos.push_back(harness::parse_algo(a));
      opt.steps = suite_steps;
      opt.eval.episodes = suite_episodes;
      opt.log = [](const std::string& msg) { std::cout << msg << std::endl; };
      const auto result = harness::run_experiment_suite(opt);
      std::cout << "comparison written to " << result.comparison_csv.generic_string() << "\n";
      return 0;
    }
    if (*plot) {
      std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
      harness::emit_plot(paths, plot_out, title);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
