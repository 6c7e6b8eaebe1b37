#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fpg/bench.hpp"
#include "fpg/config.hpp"
#include "fpg/frac_td.hpp"
#include "fpg/trainer.hpp"

namespace fpg::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

std::vector<trainer::Algo> parse_algos(const std::string& list) {
  std::vector<trainer::Algo> out;
  std::istringstream in(list);
  std::string name;
  while (std::getline(in, name, ',')) {
    if (!name.empty()) out.push_back(trainer::parse_algo(name));
  }
  if (out.empty()) throw UsageError("--algos is empty");
  return out;
}

void write_run_manifest(const fs::path& dir, const trainer::TrainConfig& cfg,
                        std::vector<std::pair<std::string, std::string>> artifacts) {
  config::RunManifest m;
  m.config = cfg;
  m.artifacts = std::move(artifacts);
  m.tool_version = config::tool_version();
  m.timestamp = config::utc_timestamp();
  auto out = open_out(dir / "manifest.cfg");
  config::write_manifest(out, m);
}

// ---------------------------------------------------------------------------

struct KernelCheckFlags {
  double alpha = 0.5;
  std::size_t steps = 10000;
  std::size_t seeds = 100;
  std::size_t fir_window = 64;
  std::uint64_t seed = 12345;
  bool no_clipping = false;
  std::string out;
};

int cmd_kernel_check(const KernelCheckFlags& f) {
  if (!(f.alpha > 0.0 && f.alpha < 1.0)) throw UsageError("--alpha must lie in (0,1)");
  if (f.seeds < 1) throw UsageError("--seeds must be >= 1");
  if (f.steps < 1) throw UsageError("--steps must be >= 1");
  const bool short_horizon = f.steps < 100;
  if (short_horizon) {
    std::cerr << "warning: --steps " << f.steps
              << " is too short for the timing and decay checks (need >= 100); "
                 "writing the report without checking\n";
  }

  td::FidelityOptions opt;
  opt.clipping = !f.no_clipping;
  opt.fir_window = f.fir_window;
  opt.seed = f.seed;
  const auto report = td::kernel_fidelity_report(f.alpha, f.steps, f.seeds, td::all_variants(), opt);

  const fs::path out_path = f.out.empty() ? config::default_output_root() / "kernel_report.csv" : fs::path(f.out);
  {
    auto out = open_out(out_path);
    td::write_fidelity_csv(out, report);
  }

  bool ok = true;
  std::cout << "alpha=" << f.alpha << " steps=" << f.steps << " seeds=" << f.seeds
            << " state_bytes=" << report.state_bytes << '\n';
  std::cout << "variant,slope,decile_growth,clip_events,bound_violations\n";
  for (const auto& v : report.variants) {
    const double growth = td::FidelityReport::decile_growth(v.step_time_ns);
    std::cout << v.label << ',' << v.slope << ',' << growth << ',' << v.clip_events << ','
              << v.bound_violations << '\n';
    if (short_horizon) continue;
    if (growth > 1.2) {
      std::cerr << "FAIL: " << v.label << " per-step time grew " << growth << "x\n";
      ok = false;
    }
    if (opt.clipping && v.bound_violations > 0) {
      std::cerr << "FAIL: " << v.label << " violated the clipping bound " << v.bound_violations
                << " times\n";
      ok = false;
    }
  }
  std::cout << "naive decile_growth=" << td::FidelityReport::decile_growth(report.naive.step_time_ns)
            << " fir decile_growth=" << td::FidelityReport::decile_growth(report.fir.step_time_ns)
            << '\n';
  std::cout << "best=" << report.best_variant().label << " report=" << out_path.string() << '\n';
  return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------

struct TrainFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> episodes;
  std::string out;
};

int cmd_train(const TrainFlags& f) {
  auto cfg = config::load_config(f.config_path);
  if (f.seed) cfg.seed = *f.seed;
  if (f.episodes) cfg.max_episodes = *f.episodes;
  cfg.validate();
  const fs::path dir = f.out.empty() ? config::default_output_root() : fs::path(f.out);
  fs::create_directories(dir);

  const auto art = trainer::train(cfg);
  bench::RunRecord rec;
  rec.label = trainer::to_string(cfg.algo);
  rec.config = cfg;
  rec.status = art.status == trainer::RunStatus::Ok ? "ok" : "numerical_abort";
  rec.message = art.message;
  rec.bound_violations = art.bound_violations;
  rec.metrics = art.metrics;
  {
    auto out = open_out(dir / "metrics.csv");
    bench::write_run_csv(out, rec);
  }
  {
    auto out = open_out(dir / "checkpoint.csv");
    policy::write_checkpoint(out, art.theta, art.phi);
  }
  write_run_manifest(dir, cfg, {{"metrics", "metrics.csv"}, {"checkpoint", "checkpoint.csv"}});

  std::vector<double> returns;
  for (const auto& m : art.metrics) returns.push_back(m.ret);
  std::cout << "episodes=" << art.metrics.size() << " steps=" << art.total_steps
            << " bound_violations=" << art.bound_violations;
  if (!returns.empty()) {
    const auto ep = stats::episodes_to_threshold(
        returns, envs::make_env(cfg.env)->spec().solved_threshold);
    std::cout << " episodes_to_threshold=" << (ep ? std::to_string(*ep) : "none");
  }
  std::cout << " out=" << dir.string() << '\n';
  if (art.status == trainer::RunStatus::NumericalAbort) {
    std::cerr << "numerical abort: " << art.message << '\n';
    return kNumericalAbort;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct SuiteFlags {
  std::string env = "cartpole";
  std::string config_path;
  std::size_t seeds = 20;
  std::uint64_t first_seed = 0;
  unsigned jobs = 0;
  std::optional<std::size_t> episodes;
  std::string out;
};

trainer::TrainConfig suite_base(const SuiteFlags& f) {
  auto cfg = f.config_path.empty() ? trainer::default_config(f.env) : config::load_config(f.config_path);
  if (!f.config_path.empty() && cfg.env != f.env) {
    std::cerr << "note: using env '" << cfg.env << "' from " << f.config_path << '\n';
  }
  if (f.episodes) cfg.max_episodes = *f.episodes;
  cfg.validate();
  if (f.seeds < 2) throw UsageError("--seeds must be >= 2 (statistics need two runs)");
  return cfg;
}

bench::SuiteOptions suite_options(const SuiteFlags& f) {
  bench::SuiteOptions o;
  o.seeds = f.seeds;
  o.first_seed = f.first_seed;
  o.parallelism = f.jobs;
  return o;
}

int report_cell_status(const std::vector<bench::RunRecord>& runs) {
  int code = kOk;
  for (const auto& r : runs) {
    if (r.status == "ok") continue;
    std::cerr << r.label << " seed " << r.config.seed << ": " << r.status << ": " << r.message << '\n';
    if (r.status == "numerical_abort") code = kNumericalAbort;
  }
  return code;
}

int cmd_bench(const SuiteFlags& f, const std::string& algos, bool ablations,
              const std::string& comparator) {
  const auto base = suite_base(f);
  auto opt = suite_options(f);
  opt.comparator = comparator;
  const fs::path dir = f.out.empty() ? config::default_output_root() / "bench" : fs::path(f.out);

  const auto suite = bench::run_suite(base, parse_algos(algos), opt, ablations);
  bench::write_runs(dir / "runs", suite.runs);
  {
    auto out = open_out(dir / "suite_summary.csv");
    bench::write_suite_summary(out, suite);
  }
  {
    auto out = open_out(dir / "plot_data.csv");
    bench::write_plot_data(out, suite);
  }
  write_run_manifest(dir, base, {{"summary", "suite_summary.csv"},
                                 {"plot_data", "plot_data.csv"},
                                 {"runs", "runs/index.txt"}});
  bench::write_suite_summary(std::cout, suite);
  return report_cell_status(suite.runs);
}

int cmd_sweep(const SuiteFlags& f, const std::string& range) {
  const auto base = suite_base(f);
  const auto alphas = parse_alpha_range(range);
  const auto opt = suite_options(f);
  const fs::path dir = f.out.empty() ? config::default_output_root() / "sweep" : fs::path(f.out);

  std::vector<bench::RunRecord> runs;
  const auto rows = bench::alpha_sweep(base, alphas, opt, &runs);
  bench::write_runs(dir / "runs", runs);
  {
    auto out = open_out(dir / "sweep.csv");
    bench::write_sweep_csv(out, rows, base, opt);
  }
  write_run_manifest(dir, base, {{"sweep", "sweep.csv"}, {"runs", "runs/index.txt"}});
  bench::write_sweep_csv(std::cout, rows, base, opt);
  return report_cell_status(runs);
}

int cmd_aggregate(const std::string& dir, const std::string& comparator) {
  const auto suite = bench::aggregate(bench::read_runs(fs::path(dir) / "runs"), comparator);
  bench::write_suite_summary(std::cout, suite);
  return kOk;
}

}  // namespace

std::vector<double> parse_alpha_range(const std::string& spec) {
  std::vector<double> parts;
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("--alpha expects lo:hi:step, got '" + spec + "'");
    }
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw UsageError("--alpha expects lo:hi:step with step > 0 and lo <= hi");
  }
  std::vector<double> out;
  const double lo = parts[0], hi = parts[1], step = parts[2];
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) {
    out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return out;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Fractional policy gradients: kernels, training and benchmarks", "fpg"};
  app.require_subcommand(1);
  app.set_version_flag("--version", config::tool_version());

  KernelCheckFlags kc;
  auto* kc_cmd = app.add_subcommand("kernel-check", "Compare recursive, FIR and exact fractional TD-errors");
  kc_cmd->add_option("--alpha", kc.alpha, "Fractional order in (0,1)")->capture_default_str();
  kc_cmd->add_option("--steps", kc.steps, "Sequence length")->capture_default_str();
  kc_cmd->add_option("--seeds", kc.seeds, "Number of random sequences")->capture_default_str();
  kc_cmd->add_option("--window", kc.fir_window, "FIR truncation window")->capture_default_str();
  kc_cmd->add_option("--seed", kc.seed, "Sequence generator seed")->capture_default_str();
  kc_cmd->add_flag("--no-clipping", kc.no_clipping, "Disable adaptive clipping");
  kc_cmd->add_option("--out", kc.out, "CSV report path");

  TrainFlags tr;
  auto* tr_cmd = app.add_subcommand("train", "Train one run from a config file");
  tr_cmd->add_option("--config", tr.config_path, "Config file")->required();
  tr_cmd->add_option("--seed", tr.seed, "Override [run] seed");
  tr_cmd->add_option("--episodes", tr.episodes, "Override [run] max_episodes");
  tr_cmd->add_option("--out", tr.out, "Output directory");

  SuiteFlags bf;
  std::string algos = "fpg,a2c,reinforce";
  std::string comparator = "a2c";
  bool ablations = false;
  auto* bench_cmd = app.add_subcommand("bench", "Multi-seed comparison suite");
  SuiteFlags sf;
  std::string alpha_range = "0.5:0.8:0.1";
  auto* sweep_cmd = app.add_subcommand("sweep", "Alpha sensitivity sweep for FPG");
  for (auto [cmd, flags] : {std::pair{bench_cmd, &bf}, std::pair{sweep_cmd, &sf}}) {
    cmd->add_option("--env", flags->env, "Environment")->capture_default_str();
    cmd->add_option("--config", flags->config_path, "Base config file (default: env defaults)");
    cmd->add_option("--seeds", flags->seeds, "Seeds per cell (>= 2)")->capture_default_str();
    cmd->add_option("--first-seed", flags->first_seed, "First seed")->capture_default_str();
    cmd->add_option("--jobs", flags->jobs, "Parallel runs (0: hardware concurrency)")->capture_default_str();
    cmd->add_option("--episodes", flags->episodes, "Override max_episodes");
    cmd->add_option("--out", flags->out, "Output directory");
  }
  bench_cmd->add_option("--algos", algos, "Comma-separated algorithms")->capture_default_str();
  bench_cmd->add_option("--comparator", comparator, "Denominator of the variance ratio")->capture_default_str();
  bench_cmd->add_flag("--ablations", ablations, "Add FPG ablation cells");
  sweep_cmd->add_option("--alpha", alpha_range, "lo:hi:step (inclusive) or a single value")->capture_default_str();

  std::string agg_dir;
  std::string agg_comparator = "a2c";
  auto* agg_cmd = app.add_subcommand("aggregate", "Recompute a suite summary from stored run CSVs");
  agg_cmd->add_option("--dir", agg_dir, "Suite output directory (containing runs/)")->required();
  agg_cmd->add_option("--comparator", agg_comparator, "Denominator of the variance ratio")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*kc_cmd) return cmd_kernel_check(kc);
    if (*tr_cmd) return cmd_train(tr);
    if (*bench_cmd) return cmd_bench(bf, algos, ablations, comparator);
    if (*sweep_cmd) return cmd_sweep(sf, alpha_range);
    if (*agg_cmd) return cmd_aggregate(agg_dir, agg_comparator);
  } catch (const config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return kUsage;
  } catch (const trainer::NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return kNumericalAbort;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace fpg::cli
