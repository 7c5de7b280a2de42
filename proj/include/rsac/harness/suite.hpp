#pragma once

#include "rsac/harness/run.hpp"

#include <functional>

namespace rsac::harness {

/// Display label of a run: the algo id, with "-random" for periodic random
/// attacks and "-l<m>" for an enlarged nominal length.
std::string run_label(const RunConfig& config);

struct SuiteOptions {
  /// main, modified-default or random-attack.
  std::string name = "main";
  std::filesystem::path out_dir = "runs/suite";
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<envs::Domain> envs{envs::Domain::kPendulum, envs::Domain::kCartPole};
  /// 0 keeps the per-domain defaults.
  long steps = 0;
  /// Restricts the main suite to these algos when non-empty.
  std::vector<Algo> algos;
  EvalOptions eval{};
  bool trace = false;
  std::function<void(const std::string&)> log;
};

struct SuiteEntry {
  std::string label;
  RunConfig config;
};

std::vector<SuiteEntry> plan_suite(const SuiteOptions& options);

/// Nominal lengths used to retrain SAC in the modified-default suite.
std::vector<double> modified_default_lengths(envs::Domain domain);

struct SuiteRunResult {
  SuiteEntry entry;
  RunRecord record;
  bool reused = false;
  std::filesystem::path eval_csv;
};

/// Per (label, env, multiplier): mean and sample std over seeds of the
/// per-seed mean return.
struct ComparisonRow {
  std::string label;
  std::string env;
  double multiplier = 1.0;
  int seeds = 0;
  double mean = 0.0;
  double std = 0.0;
};

struct SuiteResult {
  std::vector<SuiteRunResult> runs;
  std::vector<ComparisonRow> comparison;
  std::filesystem::path comparison_csv;
};

/// Trains every planned run, reusing a run directory whose config.txt is
/// identical and whose run.txt reports completion, evaluates each final
/// checkpoint and writes comparison.csv.
SuiteResult run_experiment_suite(const SuiteOptions& options);

std::vector<ComparisonRow> compare(const std::vector<EvalReport>& per_seed_reports);
void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::filesystem::path& path);

}  // namespace rsac::harness
