#include "rsac/harness/plot.hpp"
#include "rsac/harness/suite.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

using namespace rsac;
using namespace rsac::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "rsac_test_harness" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::vector<std::vector<std::string>> out;
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

RunConfig small(Algo algo, long steps, const std::string& dir) {
  RunConfig c;
  c.algo = algo;
  c.total_steps = steps;
  c.warmup = 64;
  c.final_eval_episodes = 2;
  c.out_dir = scratch(dir);
  return c;
}

double recorded_eval(const fs::path& dir) {
  std::ifstream in(dir / "run.txt");
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("final_eval_mean = ", 0) == 0) return parse_double(line.substr(18));
  return NAN;
}

}  // namespace

TEST(Config, TextRoundTrip) {
  RunConfig c;
  c.algo = Algo::kSacAo;
  c.env = envs::Domain::kCartPole;
  c.seed = 12345678901234ull;
  c.lr = 1.0 / 3.0;
  c.nominal_multiplier = 1.75;
  c.trace = true;
  c.out_dir = "some/dir";
  const auto back = RunConfig::from_text(c.to_text());
  EXPECT_EQ(back.to_text(), c.to_text());
  EXPECT_EQ(back.lr, c.lr);
  EXPECT_EQ(back.seed, c.seed);
  for (const auto& key : RunConfig::keys()) EXPECT_EQ(back.get(key), c.get(key)) << key;
}

TEST(Config, RejectsUnknownKeysAndMalformedLines) {
  RunConfig c;
  EXPECT_THROW(c.set("no_such_key", "1"), std::invalid_argument);
  EXPECT_THROW(RunConfig::from_text("lr 0.1\n"), std::invalid_argument);
  EXPECT_THROW(c.set("lr", "fast"), std::invalid_argument);
  EXPECT_THROW(c.set("algo", "ppo"), std::invalid_argument);
}

TEST(Config, ResolvesDomainDefaultsAndAttackMode) {
  RunConfig c;
  c.algo = Algo::kSac;
  auto r = c.resolved();
  EXPECT_EQ(r.total_steps, 60'000);
  EXPECT_EQ(r.attack_config().variant, adversary::Variant::kNone);
  c.env = envs::Domain::kCartPole;
  EXPECT_EQ(c.resolved().total_steps, 100'000);
  c.algo = Algo::kSacAe;
  EXPECT_EQ(c.resolved().attack_config().variant, adversary::Variant::kSample);
  EXPECT_EQ(c.resolved().sac_config().arch, agents::Arch::kFlat);
  c.algo = Algo::kRsacAe;
  EXPECT_EQ(c.resolved().sac_config().arch, agents::Arch::kRecurrent);
  EXPECT_EQ(c.resolved().sac_config().l_max, 10);
  EXPECT_EQ(c.resolved().sac_config().obs_dim, 4);
  c.attack = AttackMode::kRandom;
  EXPECT_EQ(c.resolved().attack_config().variant, adversary::Variant::kRandom);
}

TEST(Config, ValidateRejectsBadSettings) {
  RunConfig c = RunConfig{}.resolved();
  EXPECT_NO_THROW(c.validate());
  auto bad = c;
  bad.algo = Algo::kSacAo;
  bad.attack = AttackMode::kAdversarial;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = c;
  bad.train_freq = 2;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = c;
  bad.checkpoint_fraction = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Numbers, FormatParseRoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 10'000; ++i) {
    double v;
    const std::uint64_t b = bits(rng);
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_THROW(parse_double("1.0x"), std::invalid_argument);
  EXPECT_THROW(parse_long("12.5"), std::invalid_argument);
}

TEST(Seeds, StreamsAreDistinctAndStable) {
  EXPECT_EQ(derive_seed(3, "init"), derive_seed(3, "init"));
  EXPECT_NE(derive_seed(3, "init"), derive_seed(3, "replay"));
  EXPECT_NE(derive_seed(3, "init"), derive_seed(4, "init"));
  EXPECT_NE(derive_seed(1ull << 32, "init"), derive_seed(0, "init"));
}

TEST(Grid, ParsesInclusiveRange) {
  const auto g = parse_grid("0.5:2.0:0.25");
  ASSERT_EQ(g.size(), 7u);
  EXPECT_DOUBLE_EQ(g.front(), 0.5);
  EXPECT_DOUBLE_EQ(g[3], 1.25);
  EXPECT_DOUBLE_EQ(g.back(), 2.0);
  EXPECT_EQ(parse_grid("1:1:0.1").size(), 1u);
  EXPECT_THROW(parse_grid("0.5:2.0"), std::invalid_argument);
  EXPECT_THROW(parse_grid("2:1:0.1"), std::invalid_argument);
  EXPECT_THROW(parse_grid("0.5:2:0"), std::invalid_argument);
}

TEST(Train, PlainSacCountsUpdatesAndLogsNoAttacks) {
  auto c = small(Algo::kSac, 1500, "sac");
  c.warmup = 1000;
  const auto rec = train(c);
  EXPECT_FALSE(rec.failed);
  EXPECT_EQ(rec.steps, 1500);
  EXPECT_EQ(rec.updates, 501);
  EXPECT_EQ(rec.attack_events, 0);
  EXPECT_TRUE(rows(rec.attacks).empty());
  const auto m = rows(rec.metrics);
  ASSERT_EQ(m.size(), 8u);
  EXPECT_EQ(m.back()[0], "1500");
  EXPECT_EQ(m[6][0], "1400");
  EXPECT_EQ(rec.checkpoints.size(), 10u);
  EXPECT_TRUE(fs::exists(rec.final_checkpoint));
  EXPECT_EQ(run_status(rec.dir).value_or(""), "completed");
  EXPECT_EQ(RunConfig::from_file(rec.dir / "config.txt").to_text(), c.resolved().to_text());
}

TEST(Train, SacAoAttacksEveryStepAfterTheCleanPhase) {
  const auto rec = train(small(Algo::kSacAo, 200, "sacao"));
  const auto a = rows(rec.attacks);
  ASSERT_EQ(a.size(), 100u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(parse_long(a[i][0]), 100 + static_cast<long>(i));
    EXPECT_EQ(a[i][1], "sacao");
    EXPECT_EQ(a[i][2], a[i][3]);
  }
}

TEST(Train, OpenGateAttacksRespectInterval) {
  auto c = small(Algo::kSacAe, 400, "gate");
  c.sigma_th = 10.0;
  const auto rec = train(c);
  const auto a = rows(rec.attacks);
  ASSERT_EQ(a.size(), 9u);
  long prev = 0;
  double omega = 1.0;
  for (const auto& r : a) {
    const long step = parse_long(r[0]);
    // σ always passes, so each attack fires on the first step past t_th.
    EXPECT_EQ(step - prev, 41);
    EXPECT_EQ(r[1], "sample");
    EXPECT_EQ(parse_double(r[2]), omega);
    omega = parse_double(r[3]);
    EXPECT_GE(omega, 0.67);
    EXPECT_LE(omega, 1.5);
    EXPECT_LT(parse_double(r[5]), 10.0);
    prev = step;
  }
}

TEST(Train, SigmaGateClosedMeansNoAttacks) {
  auto c = small(Algo::kSacAe, 300, "closed");
  c.sigma_th = 0.0;
  EXPECT_EQ(train(c).attack_events, 0);
}

TEST(Train, RandomAttacksArePeriodic) {
  auto c = small(Algo::kSacAe, 350, "random");
  c.attack = AttackMode::kRandom;
  const auto a = rows(train(c).attacks);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(parse_long(a[i][0]), 100 * static_cast<long>(i + 1));
    EXPECT_EQ(a[i][1], "random");
  }
}

class Recurrent : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    auto c = small(Algo::kRsacAe, 450, "rsac_a");
    c.sigma_th = 10.0;
    c.trace = true;
    c.final_eval_episodes = 3;
    a_ = new RunRecord(train(c));
    c.out_dir = scratch("rsac_b");
    b_ = new RunRecord(train(c));
  }
  static void TearDownTestSuite() {
    delete a_;
    delete b_;
  }
  static RunRecord* a_;
  static RunRecord* b_;
};
RunRecord* Recurrent::a_ = nullptr;
RunRecord* Recurrent::b_ = nullptr;

TEST_F(Recurrent, IdenticalConfigsGiveIdenticalFiles) {
  EXPECT_EQ(slurp(a_->metrics), slurp(b_->metrics));
  EXPECT_EQ(slurp(a_->attacks), slurp(b_->attacks));
  EXPECT_EQ(slurp(*a_->trace), slurp(*b_->trace));
  EXPECT_GT(a_->attack_events, 0);
  EXPECT_EQ(a_->final_eval_mean, b_->final_eval_mean);
}

TEST_F(Recurrent, TraceHistoryLengthIsEpisodeStepCappedAtLMax) {
  const auto t = rows(*a_->trace);
  ASSERT_EQ(t.size(), 450u);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(parse_long(t[i][0]), static_cast<long>(i));
    const long ep_step = parse_long(t[i][2]);
    EXPECT_EQ(ep_step, static_cast<long>(i % 200));
    EXPECT_EQ(parse_long(t[i][3]), std::min(ep_step, 10L));
  }
}

TEST_F(Recurrent, CheckpointReproducesFinalEval) {
  EvalOptions opt;
  opt.multipliers = {1.0};
  opt.episodes = 3;
  opt.seed = derive_seed(0, "final-eval");
  const auto r = evaluate(a_->final_checkpoint, envs::Domain::kPendulum, opt);
  ASSERT_EQ(r.summary().size(), 1u);
  EXPECT_EQ(r.summary()[0].mean, recorded_eval(a_->dir));
  EXPECT_EQ(r.summary()[0].mean, a_->final_eval_mean.value());
}

TEST_F(Recurrent, EvaluationIsPureAndEpisodesShareResets) {
  EvalOptions one;
  one.multipliers = {1.25};
  one.episodes = 2;
  one.seed = 9;
  EvalOptions three = one;
  three.multipliers = {0.5, 1.25, 2.0};
  const auto x = evaluate(a_->final_checkpoint, envs::Domain::kPendulum, one);
  const auto y = evaluate(a_->final_checkpoint, envs::Domain::kPendulum, three);
  const auto z = evaluate(a_->final_checkpoint, envs::Domain::kPendulum, one);
  ASSERT_EQ(x.rows.size(), 2u);
  ASSERT_EQ(y.rows.size(), 6u);
  for (int k = 0; k < 2; ++k) {
    EXPECT_EQ(x.rows[k].ret, z.rows[k].ret);
    EXPECT_EQ(x.rows[k].ret, y.rows[2 + k].ret);
    EXPECT_EQ(x.rows[k].steps, 200);
  }
}

TEST_F(Recurrent, CheckpointForAnotherDomainIsRejected) {
  EXPECT_THROW(evaluate(a_->final_checkpoint, envs::Domain::kCartPole, EvalOptions{}), nn::ShapeError);
}

TEST(Evaluate, UntrainedPolicyLosesOnPendulum) {
  RunConfig c;
  c.algo = Algo::kSac;
  nn::Rng init(5);
  const auto nets = agents::AgentNets<float>::create(c.resolved().sac_config(), init);
  EvalOptions opt;
  opt.multipliers = {1.0};
  opt.episodes = 10;
  const auto s = evaluate_nets(nets, 0, "sac", envs::Domain::kPendulum, opt).summary();
  EXPECT_LT(s[0].mean, -700.0);
  EXPECT_THROW(evaluate_nets(nets, 0, "sac", envs::Domain::kPendulum, EvalOptions{{}, 1, 0}), std::invalid_argument);
}

TEST(Evaluate, CsvRoundTripIsExact) {
  EvalReport r;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> d(-500, 300);
  for (int i = 0; i < 14; ++i) r.rows.push_back({"rsac-ae", "pendulum", 0.5 + 0.25 * (i / 2), i % 2, d(rng), 200});
  const auto path = scratch("csv") / "eval.csv";
  fs::create_directories(path.parent_path());
  write_eval_csv(r, path);
  const auto back = read_eval_csv(path);
  ASSERT_EQ(back.rows.size(), r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].ret, r.rows[i].ret);
    EXPECT_EQ(back.rows[i].multiplier, r.rows[i].multiplier);
    EXPECT_EQ(back.rows[i].algo, "rsac-ae");
  }
  const auto s = back.summary();
  ASSERT_EQ(s.size(), 7u);
  EXPECT_DOUBLE_EQ(s[0].mean, (r.rows[0].ret + r.rows[1].ret) / 2);
  EXPECT_DOUBLE_EQ(s[0].std, std::abs(r.rows[0].ret - r.rows[1].ret) / std::sqrt(2.0));
}

TEST(Compare, UsesPerSeedMeans) {
  auto report = [](std::vector<double> rets) {
    EvalReport r;
    for (std::size_t k = 0; k < rets.size(); ++k) r.rows.push_back({"sac", "pendulum", 1.0, int(k), rets[k], 200});
    return r;
  };
  // Seed means 2 and 6.
  const auto rows = compare({report({1, 3}), report({4, 6, 8})});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].seeds, 2);
  EXPECT_DOUBLE_EQ(rows[0].mean, 4.0);
  EXPECT_DOUBLE_EQ(rows[0].std, std::sqrt(8.0));
}

TEST(Suite, PlansLabelsAndDirectories) {
  SuiteOptions o;
  o.out_dir = "out";
  o.seeds = {0, 3};
  o.envs = {envs::Domain::kPendulum};
  const auto main = plan_suite(o);
  ASSERT_EQ(main.size(), 8u);
  EXPECT_EQ(main[0].label, "sac");
  EXPECT_EQ(main[1].label, "sac-ao");
  EXPECT_EQ(main[2].label, "sac-ae");
  EXPECT_EQ(main[3].label, "rsac-ae");
  EXPECT_EQ(main[7].config.out_dir, fs::path("out/rsac-ae/pendulum/seed3"));
  EXPECT_EQ(main[7].config.seed, 3u);
  o.name = "modified-default";
  const auto mod = plan_suite(o);
  ASSERT_EQ(mod.size(), 4u);
  EXPECT_EQ(mod[0].label, "sac-l1.25");
  EXPECT_EQ(mod[1].label, "sac-l1.5");
  EXPECT_EQ(mod[1].config.attack_config().variant, adversary::Variant::kNone);
  o.name = "random-attack";
  const auto rnd = plan_suite(o);
  ASSERT_EQ(rnd.size(), 2u);
  EXPECT_EQ(rnd[0].label, "rsac-ae-random");
  EXPECT_EQ(rnd[0].config.attack_config().variant, adversary::Variant::kRandom);
  o.name = "other";
  EXPECT_THROW(plan_suite(o), std::invalid_argument);
  o.name = "modified-default";
  o.envs = {envs::Domain::kCartPole};
  EXPECT_EQ(plan_suite(o)[1].label, "sac-l2");
}

TEST(Suite, ReusesCompletedRuns) {
  SuiteOptions o;
  o.out_dir = scratch("suite");
  o.seeds = {1};
  o.envs = {envs::Domain::kPendulum};
  o.algos = {Algo::kSac};
  o.steps = 300;
  o.eval.episodes = 2;
  o.eval.multipliers = {1.0, 2.0};
  const auto first = run_experiment_suite(o);
  ASSERT_EQ(first.runs.size(), 1u);
  EXPECT_FALSE(first.runs[0].reused);
  const auto second = run_experiment_suite(o);
  EXPECT_TRUE(second.runs[0].reused);
  ASSERT_EQ(second.comparison.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(second.comparison[i].mean, first.comparison[i].mean);
  EXPECT_TRUE(fs::exists(second.comparison_csv));

  auto moved = o;
  moved.out_dir = o.out_dir / ".." / o.out_dir.filename();
  EXPECT_TRUE(run_experiment_suite(moved).runs[0].reused);
  auto changed = o;
  changed.steps = 301;
  EXPECT_FALSE(run_experiment_suite(changed).runs[0].reused);
}

TEST(Train, DivergenceIsRecordedAsFailure) {
  auto c = small(Algo::kSac, 400, "diverge");
  c.lr = 1e30;
  const auto rec = train(c);
  EXPECT_TRUE(rec.failed);
  EXPECT_LT(rec.steps, 400);
  EXPECT_FALSE(rec.error.empty());
  EXPECT_EQ(run_status(rec.dir).value_or(""), "failed");
}

TEST(Plot, PolylinePerSeriesWithOneVertexPerMultiplier) {
  EvalReport r;
  for (const char* algo : {"sac", "rsac-ae"})
    for (double m : {2.0, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75})
      for (int k = 0; k < 3; ++k) r.rows.push_back({algo, "pendulum", m, k, -100.0 * m - k, 200});
  const auto series = plot_series({r});
  ASSERT_EQ(series.size(), 2u);
  for (const auto& s : series) {
    ASSERT_EQ(s.x.size(), 7u);
    EXPECT_TRUE(std::is_sorted(s.x.begin(), s.x.end()));
  }
  const auto svg = render_svg(series, "title");
  EXPECT_EQ(svg, render_svg(series, "title"));
  std::regex poly("<polyline points=\"([^\"]*)\"");
  int lines = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), poly); it != std::sregex_iterator(); ++it) {
    std::stringstream pts((*it)[1].str());
    std::string p;
    int n = 0;
    while (pts >> p) ++n;
    EXPECT_EQ(n, 7);
    ++lines;
  }
  EXPECT_EQ(lines, 2);
  EXPECT_NE(svg.find("title"), std::string::npos);
  EXPECT_NE(svg.find("rsac-ae"), std::string::npos);
  EXPECT_THROW(emit_plot({}, scratch("plot") / "x.svg"), std::invalid_argument);
}
