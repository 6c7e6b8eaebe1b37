#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpg/stats.hpp"
#include "fpg/trainer.hpp"

namespace fpg::bench {

/// One training run as stored on disk: the config that produced it, its
/// outcome, and the per-episode rows.
struct RunRecord {
  std::string label;  // cell name, e.g. "fpg", "a2c", "fpg-clipping_off"
  trainer::TrainConfig config;
  std::string status = "ok";  // ok | numerical_abort | failed
  std::string message;
  std::uint64_t bound_violations = 0;
  std::vector<trainer::MetricsRecord> metrics;
};

/// Per-run CSV: '#' header lines carrying label, status and the full config,
/// then episode,steps,return,grad_var_window,max_abs_frac_delta,clip_events,wall_ms.
void write_run_csv(std::ostream& out, const RunRecord& run);
RunRecord read_run_csv(std::istream& in, const std::string& source = "<run>");

/// A named training configuration; run once per seed.
struct CellSpec {
  std::string label;
  trainer::TrainConfig config;
};

struct SuiteOptions {
  std::size_t seeds = 20;
  std::uint64_t first_seed = 0;
  unsigned parallelism = 0;  // 0: hardware concurrency
  std::string comparator = "a2c";
};

/// Runs every (cell, seed) pair. Seeds are first_seed, first_seed+1, ...
/// Cells are independent; the output order is cell-major and does not depend
/// on `parallelism`. A cell that throws is recorded with status "failed".
std::vector<RunRecord> run_cells(const std::vector<CellSpec>& cells,
                                 const SuiteOptions& options);

struct VariantSummary {
  std::string label;
  std::size_t runs = 0;
  std::size_t failed = 0;  // status != ok
  std::vector<std::uint64_t> seeds;
  std::vector<std::optional<std::size_t>> episodes_to_threshold;
  std::size_t solved = 0;
  /// Median with unsolved runs ranked last; none when the median falls on an
  /// unsolved run.
  std::optional<double> median_episodes;
  std::vector<double> final_return;    // mean return of the last 10 episodes
  stats::ConfidenceInterval final_return_ci;
  std::vector<double> final_third_var;  // mean grad_var_window over the final third
  stats::ConfidenceInterval final_third_var_ci;
  std::uint64_t bound_violations = 0;
};

/// Welch tests of `label` (a) against the comparator or baseline (b).
struct Comparison {
  std::string a;
  std::string b;
  std::optional<stats::WelchResult> variance;  // final_third_var
  std::optional<stats::WelchResult> episodes;  // unsolved counted as M + 1
};

struct RatioPoint {
  std::size_t episode = 0;
  double numerator = 0.0;    // seed-mean grad_var_window of fpg
  double denominator = 0.0;  // seed-mean grad_var_window of the comparator
  double ratio = 0.0;
};

struct SuiteResult {
  std::string env;
  double threshold = 0.0;
  std::size_t seeds = 0;
  std::vector<RunRecord> runs;
  std::vector<VariantSummary> variants;
  std::vector<Comparison> comparisons;
  std::string comparator;
  std::vector<RatioPoint> variance_ratio;
  std::optional<stats::DecayFit> variance_ratio_fit;

  const VariantSummary* find(const std::string& label) const;
};

/// Pure function of the runs: summaries per label (in first-appearance
/// order), Welch tests of "fpg" against every other label, and the
/// fpg/comparator variance ratio at matched episode indices.
SuiteResult aggregate(std::vector<RunRecord> runs, const std::string& comparator = "a2c");

std::vector<CellSpec> suite_cells(const trainer::TrainConfig& base,
                                  const std::vector<trainer::Algo>& algos,
                                  bool ablations);

/// Requires >= 2 seeds.
SuiteResult run_suite(const trainer::TrainConfig& base,
                      const std::vector<trainer::Algo>& algos,
                      const SuiteOptions& options, bool ablations = false);

struct SweepRow {
  double alpha = 0.0;
  VariantSummary summary;
};

/// One FPG cell per alpha. Requires >= 2 seeds.
std::vector<SweepRow> alpha_sweep(const trainer::TrainConfig& base,
                                  const std::vector<double>& alphas,
                                  const SuiteOptions& options,
                                  std::vector<RunRecord>* runs_out = nullptr);
std::vector<SweepRow> sweep_from_runs(const std::vector<RunRecord>& runs);

void write_suite_summary(std::ostream& out, const SuiteResult& suite);
void write_plot_data(std::ostream& out, const SuiteResult& suite);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const trainer::TrainConfig& base, const SuiteOptions& options);

/// File name for a run inside a suite directory, e.g. "fpg_seed3.csv".
std::string run_file_name(const RunRecord& run);

/// Writes one CSV per run into `dir` plus index.txt listing them in order.
void write_runs(const std::filesystem::path& dir, const std::vector<RunRecord>& runs);
/// Reads the runs listed in dir/index.txt, in the same order.
std::vector<RunRecord> read_runs(const std::filesystem::path& dir);

}  // namespace fpg::bench
