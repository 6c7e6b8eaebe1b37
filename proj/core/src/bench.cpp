#include "fpg/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fpg/config.hpp"
#include "fpg/envs.hpp"

namespace fpg::bench {

using config::format_double;
using trainer::MetricsRecord;
using trainer::TrainConfig;

namespace {

constexpr const char* kColumns =
    "episode,steps,return,grad_var_window,max_abs_frac_delta,clip_events,wall_ms";

void write_commented(std::ostream& out, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    out << "# " << line << '\n';
  }
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(s);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw std::runtime_error(where + ": bad number '" + s + "'");
  return v;
}

std::uint64_t parse_count(const std::string& s, const std::string& where) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw std::runtime_error(where + ": bad count '" + s + "'");
  }
  return std::stoull(s);
}

std::string ci_text(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

void write_run_csv(std::ostream& out, const RunRecord& run) {
  out << "# fpg-run label=" << run.label << " status=" << run.status
      << " bound_violations=" << run.bound_violations << '\n';
  out << "# message=" << one_line(run.message) << '\n';
  write_commented(out, config::config_to_string(run.config));
  out << kColumns << '\n';
  for (const auto& m : run.metrics) {
    out << m.episode << ',' << m.steps << ',' << format_double(m.ret) << ','
        << format_double(m.grad_var_window) << ','
        << format_double(m.max_abs_frac_delta) << ',' << m.clip_events << ','
        << format_double(m.wall_ms) << '\n';
  }
}

RunRecord read_run_csv(std::istream& in, const std::string& source) {
  RunRecord run;
  std::string config_text;
  std::string line;
  bool have_meta = false;
  bool have_columns = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    if (line.rfind("# fpg-run ", 0) == 0) {
      for (const auto& tok : split(line.substr(10), ' ')) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
        if (k == "label") run.label = v;
        if (k == "status") run.status = v;
        if (k == "bound_violations") run.bound_violations = parse_count(v, where);
      }
      have_meta = true;
    } else if (line.rfind("# message=", 0) == 0) {
      run.message = line.substr(10);
    } else if (line.rfind("# ", 0) == 0) {
      config_text += line.substr(2) + '\n';
    } else if (line == kColumns) {
      have_columns = true;
    } else if (!line.empty()) {
      if (!have_columns) throw std::runtime_error(where + ": row before column header");
      const auto cells = split(line, ',');
      if (cells.size() != 7) throw std::runtime_error(where + ": expected 7 columns");
      MetricsRecord m;
      m.episode = parse_count(cells[0], where);
      m.steps = parse_count(cells[1], where);
      m.ret = parse_double(cells[2], where);
      m.grad_var_window = parse_double(cells[3], where);
      m.max_abs_frac_delta = parse_double(cells[4], where);
      m.clip_events = parse_count(cells[5], where);
      m.wall_ms = parse_double(cells[6], where);
      run.metrics.push_back(m);
    }
  }
  if (!have_meta) throw std::runtime_error(source + ": missing '# fpg-run' header");
  std::istringstream cfg(config_text);
  run.config = config::parse_config(cfg, source);
  return run;
}

std::vector<RunRecord> run_cells(const std::vector<CellSpec>& cells,
                                 const SuiteOptions& options) {
  const std::size_t jobs = cells.size() * options.seeds;
  std::vector<RunRecord> out(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const CellSpec& cell = cells[j / options.seeds];
      RunRecord& rec = out[j];
      rec.label = cell.label;
      rec.config = cell.config;
      rec.config.seed = options.first_seed + j % options.seeds;
      try {
        const auto art = trainer::train(rec.config);
        rec.metrics = art.metrics;
        rec.bound_violations = art.bound_violations;
        rec.status = art.status == trainer::RunStatus::Ok ? "ok" : "numerical_abort";
        rec.message = art.message;
      } catch (const std::exception& e) {
        rec.status = "failed";
        rec.message = e.what();
      }
    }
  };
  unsigned threads = options.parallelism != 0 ? options.parallelism
                                              : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs, 1)));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

namespace {

std::optional<double> censored_median(std::vector<std::optional<std::size_t>> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (!a) return false;
    if (!b) return true;
    return *a < *b;
  });
  const std::size_t n = v.size();
  if (n % 2 == 1) {
    if (!v[n / 2]) return std::nullopt;
    return static_cast<double>(*v[n / 2]);
  }
  if (!v[n / 2 - 1] || !v[n / 2]) return std::nullopt;
  return 0.5 * static_cast<double>(*v[n / 2 - 1] + *v[n / 2]);
}

double env_threshold(const std::string& env) {
  return envs::make_env(env)->spec().solved_threshold;
}

VariantSummary summarize(const std::string& label, const std::vector<const RunRecord*>& runs) {
  VariantSummary s;
  s.label = label;
  for (const RunRecord* r : runs) {
    ++s.runs;
    if (r->status != "ok") ++s.failed;
    s.bound_violations += r->bound_violations;
    if (r->metrics.empty()) continue;
    s.seeds.push_back(r->config.seed);
    std::vector<double> returns;
    for (const auto& m : r->metrics) returns.push_back(m.ret);
    const auto ep = stats::episodes_to_threshold(returns, env_threshold(r->config.env));
    s.episodes_to_threshold.push_back(ep);
    if (ep) ++s.solved;

    const std::size_t n = returns.size();
    const std::size_t tail = std::min<std::size_t>(10, n);
    s.final_return.push_back(
        stats::mean(std::span<const double>(returns).subspan(n - tail)));

    std::vector<double> vars;
    for (std::size_t i = (2 * n) / 3; i < n; ++i) vars.push_back(r->metrics[i].grad_var_window);
    s.final_third_var.push_back(stats::mean(vars));
  }
  s.median_episodes = censored_median(s.episodes_to_threshold);
  if (!s.final_return.empty()) s.final_return_ci = stats::normal_ci95(s.final_return);
  if (!s.final_third_var.empty()) s.final_third_var_ci = stats::normal_ci95(s.final_third_var);
  return s;
}

std::vector<double> censored_episodes(const VariantSummary& s, std::size_t max_episodes) {
  std::vector<double> out;
  for (const auto& e : s.episodes_to_threshold) {
    out.push_back(static_cast<double>(e ? *e : max_episodes + 1));
  }
  return out;
}

std::optional<stats::WelchResult> try_welch(const std::vector<double>& a,
                                            const std::vector<double>& b) {
  try {
    return stats::welch_t(a, b);
  } catch (const stats::InsufficientData&) {
    return std::nullopt;
  }
}

// Label -> runs, labels kept in order of first appearance.
std::vector<std::pair<std::string, std::vector<const RunRecord*>>> group(
    const std::vector<RunRecord>& runs) {
  std::vector<std::pair<std::string, std::vector<const RunRecord*>>> out;
  for (const auto& r : runs) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& g) { return g.first == r.label; });
    if (it == out.end()) {
      out.push_back({r.label, {}});
      it = out.end() - 1;
    }
    it->second.push_back(&r);
  }
  return out;
}

// Seed-mean of a metric at each episode index present in every run.
std::vector<double> seed_mean_series(const std::vector<const RunRecord*>& runs,
                                     double MetricsRecord::*field) {
  std::size_t len = SIZE_MAX;
  std::size_t used = 0;
  for (const RunRecord* r : runs) {
    if (r->metrics.empty()) continue;
    len = std::min(len, r->metrics.size());
    ++used;
  }
  if (used == 0) return {};
  std::vector<double> out(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    math::KahanSum sum;
    for (const RunRecord* r : runs) {
      if (!r->metrics.empty()) sum += r->metrics[i].*field;
    }
    out[i] = sum.value() / static_cast<double>(used);
  }
  return out;
}

}  // namespace

const VariantSummary* SuiteResult::find(const std::string& label) const {
  for (const auto& v : variants) {
    if (v.label == label) return &v;
  }
  return nullptr;
}

SuiteResult aggregate(std::vector<RunRecord> runs, const std::string& comparator) {
  SuiteResult out;
  out.comparator = comparator;
  out.runs = std::move(runs);
  if (out.runs.empty()) throw stats::InsufficientData("aggregate: no runs");
  out.env = out.runs.front().config.env;
  out.threshold = env_threshold(out.env);

  const auto groups = group(out.runs);
  out.seeds = groups.front().second.size();
  std::size_t max_episodes = 0;
  for (const auto& r : out.runs) max_episodes = std::max(max_episodes, r.config.max_episodes);
  for (const auto& [label, members] : groups) out.variants.push_back(summarize(label, members));

  const VariantSummary* fpg = out.find("fpg");
  if (fpg != nullptr) {
    for (const auto& v : out.variants) {
      if (v.label == "fpg") continue;
      Comparison c;
      c.a = "fpg";
      c.b = v.label;
      c.variance = try_welch(fpg->final_third_var, v.final_third_var);
      c.episodes = try_welch(censored_episodes(*fpg, max_episodes),
                             censored_episodes(v, max_episodes));
      out.comparisons.push_back(c);
    }
  }

  const auto num_group = std::find_if(groups.begin(), groups.end(),
                                      [](const auto& g) { return g.first == "fpg"; });
  const auto den_group = std::find_if(groups.begin(), groups.end(),
                                      [&](const auto& g) { return g.first == comparator; });
  if (num_group != groups.end() && den_group != groups.end()) {
    const auto num = seed_mean_series(num_group->second, &MetricsRecord::grad_var_window);
    const auto den = seed_mean_series(den_group->second, &MetricsRecord::grad_var_window);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < std::min(num.size(), den.size()); ++i) {
      if (!(den[i] > 0.0)) continue;
      RatioPoint p{i + 1, num[i], den[i], num[i] / den[i]};
      out.variance_ratio.push_back(p);
      pts.emplace_back(static_cast<double>(p.episode), p.ratio);
    }
    try {
      out.variance_ratio_fit = stats::variance_decay_fit(pts);
    } catch (const stats::InsufficientData&) {
    }
  }
  return out;
}

std::vector<CellSpec> suite_cells(const TrainConfig& base,
                                  const std::vector<trainer::Algo>& algos,
                                  bool ablations) {
  std::vector<CellSpec> cells;
  for (auto algo : algos) {
    TrainConfig c = base;
    c.algo = algo;
    cells.push_back({trainer::to_string(algo), c});
  }
  const bool has_fpg =
      std::find(algos.begin(), algos.end(), trainer::Algo::Fpg) != algos.end();
  if (ablations && has_fpg) {
    TrainConfig c = base;
    c.algo = trainer::Algo::Fpg;
    TrainConfig clip = c;
    clip.ablations.clipping_off = true;
    TrainConfig rec = c;
    rec.ablations.recursion_off = true;
    TrainConfig mb = c;
    mb.ablations.minibatch_off = true;
    cells.push_back({"fpg-clipping_off", clip});
    cells.push_back({"fpg-recursion_off", rec});
    cells.push_back({"fpg-minibatch_off", mb});
  }
  return cells;
}

SuiteResult run_suite(const TrainConfig& base, const std::vector<trainer::Algo>& algos,
                      const SuiteOptions& options, bool ablations) {
  if (options.seeds < 2) throw std::invalid_argument("run_suite: at least 2 seeds are required");
  if (algos.empty()) throw std::invalid_argument("run_suite: no algorithms given");
  base.validate();
  return aggregate(run_cells(suite_cells(base, algos, ablations), options), options.comparator);
}

std::vector<SweepRow> sweep_from_runs(const std::vector<RunRecord>& runs) {
  std::vector<SweepRow> rows;
  for (const auto& [label, members] : group(runs)) {
    rows.push_back({members.front()->config.alpha, summarize(label, members)});
  }
  return rows;
}

std::vector<SweepRow> alpha_sweep(const TrainConfig& base, const std::vector<double>& alphas,
                                  const SuiteOptions& options,
                                  std::vector<RunRecord>* runs_out) {
  if (options.seeds < 2) throw std::invalid_argument("alpha_sweep: at least 2 seeds are required");
  if (alphas.empty()) throw std::invalid_argument("alpha_sweep: no alpha values");
  std::vector<CellSpec> cells;
  for (double a : alphas) {
    TrainConfig c = base;
    c.algo = trainer::Algo::Fpg;
    c.alpha = a;
    c.validate();
    cells.push_back({"alpha=" + format_double(a), c});
  }
  auto runs = run_cells(cells, options);
  auto rows = sweep_from_runs(runs);
  if (runs_out != nullptr) *runs_out = std::move(runs);
  return rows;
}

namespace {

void write_suite_header(std::ostream& out, const SuiteResult& suite) {
  out << "# fpg-suite env=" << suite.env << " threshold=" << format_double(suite.threshold)
      << " seeds=" << suite.seeds << " comparator=" << suite.comparator << '\n';
  std::vector<std::string> seen;
  for (const auto& r : suite.runs) {
    if (std::find(seen.begin(), seen.end(), r.label) != seen.end()) continue;
    seen.push_back(r.label);
    out << "# cell " << r.label << " seeds=";
    bool first = true;
    for (const auto& s : suite.runs) {
      if (s.label != r.label) continue;
      out << (first ? "" : ";") << s.config.seed;
      first = false;
    }
    out << '\n';
    TrainConfig shown = r.config;
    shown.seed = 0;
    write_commented(out, config::config_to_string(shown));
  }
}

}  // namespace

void write_suite_summary(std::ostream& out, const SuiteResult& suite) {
  write_suite_header(out, suite);
  out << "label,runs,failed,solved,median_episodes,mean_final_return,final_return_ci,"
         "mean_final_third_var,final_third_var_ci,bound_violations,"
         "var_welch_t,var_welch_dof,var_p_fpg_lower,"
         "episodes_welch_t,episodes_welch_dof,episodes_p_two_sided\n";
  for (const auto& v : suite.variants) {
    out << v.label << ',' << v.runs << ',' << v.failed << ',' << v.solved << ','
        << ci_text(v.median_episodes) << ',' << format_double(v.final_return_ci.mean) << ','
        << format_double(v.final_return_ci.half_width) << ','
        << format_double(v.final_third_var_ci.mean) << ','
        << format_double(v.final_third_var_ci.half_width) << ',' << v.bound_violations;
    const auto c = std::find_if(suite.comparisons.begin(), suite.comparisons.end(),
                                [&](const Comparison& x) { return x.b == v.label; });
    if (c != suite.comparisons.end() && c->variance) {
      out << ',' << format_double(c->variance->t) << ',' << format_double(c->variance->dof)
          << ',' << format_double(c->variance->p_less());
    } else {
      out << ",,,";
    }
    if (c != suite.comparisons.end() && c->episodes) {
      out << ',' << format_double(c->episodes->t) << ',' << format_double(c->episodes->dof)
          << ',' << format_double(c->episodes->p);
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

void write_plot_data(std::ostream& out, const SuiteResult& suite) {
  write_suite_header(out, suite);
  out << "series,label,x,y,ci\n";
  for (const auto& [label, members] : group(suite.runs)) {
    for (auto [name, field] : {std::pair{"return", &MetricsRecord::ret},
                               std::pair{"grad_var", &MetricsRecord::grad_var_window}}) {
      const auto mean = seed_mean_series(members, field);
      for (std::size_t i = 0; i < mean.size(); ++i) {
        std::vector<double> xs;
        for (const RunRecord* r : members) {
          if (!r->metrics.empty()) xs.push_back(r->metrics[i].*field);
        }
        const auto ci = stats::normal_ci95(xs);
        out << name << ',' << label << ',' << (i + 1) << ',' << format_double(mean[i]) << ','
            << format_double(ci.half_width) << '\n';
      }
    }
  }
  for (const auto& p : suite.variance_ratio) {
    out << "var_ratio,fpg/" << suite.comparator << ',' << p.episode << ','
        << format_double(p.ratio) << ",\n";
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const TrainConfig& base, const SuiteOptions& options) {
  out << "# fpg-sweep seeds=" << options.seeds << " first_seed=" << options.first_seed << '\n';
  TrainConfig shown = base;
  shown.seed = 0;
  write_commented(out, config::config_to_string(shown));
  out << "alpha,runs,failed,solved,median_episodes,mean_final_return,final_return_ci,"
         "mean_final_third_var,final_third_var_ci\n";
  for (const auto& r : rows) {
    const auto& s = r.summary;
    out << format_double(r.alpha) << ',' << s.runs << ',' << s.failed << ',' << s.solved << ','
        << ci_text(s.median_episodes) << ',' << format_double(s.final_return_ci.mean) << ','
        << format_double(s.final_return_ci.half_width) << ','
        << format_double(s.final_third_var_ci.mean) << ','
        << format_double(s.final_third_var_ci.half_width) << '\n';
  }
}

std::string run_file_name(const RunRecord& run) {
  std::string label = run.label;
  for (char& ch : label) {
    if (ch == '=' || ch == '/' || ch == ' ') ch = '_';
  }
  return label + "_seed" + std::to_string(run.config.seed) + ".csv";
}

void write_runs(const std::filesystem::path& dir, const std::vector<RunRecord>& runs) {
  std::filesystem::create_directories(dir);
  std::ofstream index(dir / "index.txt");
  if (!index) throw std::runtime_error("cannot write " + (dir / "index.txt").string());
  for (const auto& r : runs) {
    const auto name = run_file_name(r);
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    write_run_csv(f, r);
    index << name << '\n';
  }
}

std::vector<RunRecord> read_runs(const std::filesystem::path& dir) {
  std::ifstream index(dir / "index.txt");
  if (!index) throw std::runtime_error("cannot read " + (dir / "index.txt").string());
  std::vector<RunRecord> out;
  std::string name;
  while (std::getline(index, name)) {
    if (name.empty()) continue;
    std::ifstream f(dir / name);
    if (!f) throw std::runtime_error("cannot read " + (dir / name).string());
    out.push_back(read_run_csv(f, (dir / name).string()));
  }
  return out;
}

}  // namespace fpg::bench
