#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "fpg/bench.hpp"
#include "fpg/config.hpp"

namespace bench = fpg::bench;
namespace tr = fpg::trainer;
namespace fs = std::filesystem;

namespace {

tr::TrainConfig small_config() {
  auto c = tr::default_config("cartpole");
  c.hidden = 8;
  c.max_episodes = 30;
  return c;
}

bool same_summary(const bench::SuiteResult& a, const bench::SuiteResult& b) {
  std::ostringstream x, y, px, py;
  bench::write_suite_summary(x, a);
  bench::write_suite_summary(y, b);
  bench::write_plot_data(px, a);
  bench::write_plot_data(py, b);
  return x.str() == y.str() && px.str() == py.str();
}

fs::path temp_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("fpg_test_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(RunCsv, RoundTripIsBitExact) {
  bench::RunRecord r;
  r.label = "fpg";
  r.config = small_config();
  r.config.seed = 3;
  r.status = "numerical_abort";
  r.message = "episode 4: non-finite\nparameters";
  r.bound_violations = 0;
  for (std::size_t e = 1; e <= 5; ++e) {
    r.metrics.push_back({e, 10 + e, 1.0 / 3.0 * e, 0.1 * e, 2.0 / 7.0, e * 2, 0.0});
  }
  std::stringstream io;
  bench::write_run_csv(io, r);
  const auto back = bench::read_run_csv(io);
  EXPECT_EQ(back.label, r.label);
  EXPECT_EQ(back.status, r.status);
  EXPECT_EQ(back.message, "episode 4: non-finite parameters");
  EXPECT_EQ(fpg::config::config_to_string(back.config), fpg::config::config_to_string(r.config));
  ASSERT_EQ(back.metrics.size(), r.metrics.size());
  for (std::size_t i = 0; i < r.metrics.size(); ++i) {
    EXPECT_EQ(back.metrics[i].ret, r.metrics[i].ret);
    EXPECT_EQ(back.metrics[i].grad_var_window, r.metrics[i].grad_var_window);
    EXPECT_EQ(back.metrics[i].max_abs_frac_delta, r.metrics[i].max_abs_frac_delta);
    EXPECT_EQ(back.metrics[i].clip_events, r.metrics[i].clip_events);
  }
  std::string header;
  std::stringstream again;
  bench::write_run_csv(again, r);
  while (std::getline(again, header) && header[0] == '#') {
  }
  EXPECT_EQ(header, "episode,steps,return,grad_var_window,max_abs_frac_delta,clip_events,wall_ms");
}

TEST(Suite, RequiresTwoSeeds) {
  bench::SuiteOptions o;
  o.seeds = 1;
  EXPECT_THROW(bench::run_suite(small_config(), {tr::Algo::Fpg}, o), std::invalid_argument);
  EXPECT_THROW(bench::alpha_sweep(small_config(), {0.5}, o), std::invalid_argument);
}

TEST(Suite, AggregatesAndIsIndependentOfParallelism) {
  bench::SuiteOptions o;
  o.seeds = 3;
  o.parallelism = 1;
  const auto serial = bench::run_suite(small_config(), {tr::Algo::Fpg, tr::Algo::A2c}, o);
  o.parallelism = 4;
  const auto parallel = bench::run_suite(small_config(), {tr::Algo::Fpg, tr::Algo::A2c}, o);
  EXPECT_TRUE(same_summary(serial, parallel));

  ASSERT_EQ(serial.variants.size(), 2u);
  EXPECT_EQ(serial.seeds, 3u);
  const auto* f = serial.find("fpg");
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->runs, 3u);
  EXPECT_EQ(f->final_return.size(), 3u);
  EXPECT_NEAR(f->final_return_ci.half_width,
              1.96 * std::sqrt(fpg::stats::sample_variance(f->final_return)) / std::sqrt(3.0), 1e-12);
  ASSERT_EQ(serial.comparisons.size(), 1u);
  EXPECT_EQ(serial.comparisons[0].b, "a2c");
  EXPECT_TRUE(serial.comparisons[0].variance.has_value());
  EXPECT_EQ(serial.variance_ratio.size(), 30u);
  EXPECT_TRUE(serial.variance_ratio_fit.has_value());
  for (const auto& p : serial.variance_ratio) {
    EXPECT_DOUBLE_EQ(p.ratio, p.numerator / p.denominator);
  }
}

TEST(Suite, ReaggregationFromCsvIsBitExact) {
  bench::SuiteOptions o;
  o.seeds = 2;
  o.parallelism = 2;
  const auto suite = bench::run_suite(small_config(), {tr::Algo::Fpg, tr::Algo::Reinforce}, o, true);
  EXPECT_EQ(suite.variants.size(), 5u);  // fpg, reinforce, three ablations
  const auto dir = temp_dir("reagg");
  bench::write_runs(dir, suite.runs);
  const auto again = bench::aggregate(bench::read_runs(dir), suite.comparator);
  EXPECT_TRUE(same_summary(suite, again));
  fs::remove_all(dir);
}

TEST(Suite, FailedCellsAreRecordedNotFatal) {
  bench::SuiteOptions o;
  o.seeds = 2;
  auto bad = small_config();
  bad.env = "no-such-env";
  const auto runs = bench::run_cells({{"good", small_config()}, {"bad", bad}}, o);
  ASSERT_EQ(runs.size(), 4u);
  EXPECT_EQ(runs[0].status, "ok");
  EXPECT_EQ(runs[2].status, "failed");
  EXPECT_FALSE(runs[2].message.empty());
}

TEST(Sweep, OneRowPerAlpha) {
  bench::SuiteOptions o;
  o.seeds = 2;
  auto base = small_config();
  base.max_episodes = 12;
  const std::vector<double> alphas = {0.5, 0.6, 0.65, 0.7, 0.8};
  std::vector<bench::RunRecord> runs;
  const auto rows = bench::alpha_sweep(base, alphas, o, &runs);
  ASSERT_EQ(rows.size(), alphas.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].alpha, alphas[i]);
    EXPECT_EQ(rows[i].summary.runs, 2u);
  }
  std::ostringstream out;
  bench::write_sweep_csv(out, rows, base, o);
  std::istringstream in(out.str());
  std::string line;
  std::size_t data = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#' && line.rfind("alpha,", 0) != 0) ++data;
  }
  EXPECT_EQ(data, alphas.size());
  const auto again = bench::sweep_from_runs(runs);
  std::ostringstream out2;
  bench::write_sweep_csv(out2, again, base, o);
  EXPECT_EQ(out.str(), out2.str());
}

TEST(Summary, CensoredMedian) {
  bench::RunRecord solved, unsolved;
  solved.label = unsolved.label = "x";
  solved.config = unsolved.config = small_config();
  for (std::size_t e = 1; e <= 20; ++e) {
    solved.metrics.push_back({e, 300, 300.0, 1.0, 0.0, 0, 0.0});
    unsolved.metrics.push_back({e, 20, 20.0, 1.0, 0.0, 0, 0.0});
  }
  auto s1 = bench::aggregate({solved, solved, unsolved});
  EXPECT_EQ(s1.variants[0].solved, 2u);
  EXPECT_EQ(s1.variants[0].median_episodes, 10.0);
  auto s2 = bench::aggregate({solved, unsolved, unsolved});
  EXPECT_FALSE(s2.variants[0].median_episodes.has_value());
}
