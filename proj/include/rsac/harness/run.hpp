#pragma once

#include "rsac/harness/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rsac::harness {

struct RunRecord {
  RunConfig config;
  std::filesystem::path dir;
  std::filesystem::path metrics;
  std::filesystem::path attacks;
  std::optional<std::filesystem::path> trace;
  std::vector<std::filesystem::path> checkpoints;
  std::filesystem::path final_checkpoint;
  long steps = 0;
  long updates = 0;
  long attack_events = 0;
  bool failed = false;
  std::string error;
  double wall_seconds = 0.0;
  std::optional<double> final_eval_mean;
};

/// Runs one training pipeline and writes into config.out_dir:
/// config.txt, metrics.csv (one row per episode), attacks.csv, trace.csv
/// when requested, checkpoints/ and run.txt. A non-finite loss stops the run
/// and returns the partial record with `failed` set.
RunRecord train(const RunConfig& config);

/// status and counters from a run directory's run.txt; empty if absent.
std::optional<std::string> run_status(const std::filesystem::path& dir);

struct EvalRow {
  std::string algo;
  std::string env;
  double multiplier = 1.0;
  int episode = 0;
  double ret = 0.0;
  int steps = 0;
};

struct EvalSummary {
  double multiplier = 1.0;
  double mean = 0.0;
  double std = 0.0;
  int n = 0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  /// Per multiplier, in first-seen order. `std` is the sample deviation.
  std::vector<EvalSummary> summary() const;
};

struct EvalOptions {
  std::vector<double> multipliers{0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  int episodes = 20;
  std::uint64_t seed = 0;
};

/// LO:HI:STEP, inclusive of HI up to rounding.
std::vector<double> parse_grid(std::string_view spec);

/// Mean-mode rollouts with ω fixed per multiplier; no attacks. Episode k
/// uses the same reset seed at every multiplier.
EvalReport evaluate_nets(const agents::AgentNets<float>& nets, int l_max, std::string_view algo,
                         envs::Domain domain, const EvalOptions& options);
/// Loads a checkpoint manifest and evaluates it. Throws nn::ShapeError when
/// the checkpoint does not fit the domain.
EvalReport evaluate(const std::filesystem::path& checkpoint, envs::Domain domain, const EvalOptions& options);

void write_eval_csv(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_eval_csv(const std::filesystem::path& path);

}  // namespace rsac::harness
