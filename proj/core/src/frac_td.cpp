#include "fpg/frac_td.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "fpg/rng.hpp"

namespace fpg::td {

std::string to_string(MuVariant v) {
  switch (v) {
    case MuVariant::Theorem: return "theorem";
    case MuVariant::Algorithm: return "algorithm";
    case MuVariant::Derivation: return "derivation";
    case MuVariant::Memoryless: return "memoryless";
  }
  return "?";
}

std::string to_string(EtaVariant v) {
  switch (v) {
    case EtaVariant::PaperLiteral: return "paper_literal";
    case EtaVariant::GlConsistent: return "gl_consistent";
  }
  return "?";
}

MuVariant parse_mu_variant(const std::string& s) {
  if (s == "theorem") return MuVariant::Theorem;
  if (s == "algorithm") return MuVariant::Algorithm;
  if (s == "derivation") return MuVariant::Derivation;
  if (s == "memoryless") return MuVariant::Memoryless;
  throw std::invalid_argument("unknown mu variant '" + s + "'");
}

EtaVariant parse_eta_variant(const std::string& s) {
  if (s == "paper_literal") return EtaVariant::PaperLiteral;
  if (s == "gl_consistent") return EtaVariant::GlConsistent;
  throw std::invalid_argument("unknown eta variant '" + s + "'");
}

FracTdConfig make_frac_td_config(double alpha, MuVariant mu, EtaVariant eta,
                                 bool clipping, double eps_tol) {
  FracTdConfig c;
  c.alpha = alpha;
  c.mu_variant = mu;
  c.eta_variant = eta;
  c.eps_tol = eps_tol;
  c.clipping_enabled = clipping;
  c.constants = math::stabilization_constants(alpha, eps_tol);
  return c;
}

double td_error(double reward, double v_next, double v_curr, double gamma,
                bool done) {
  return reward + gamma * v_next * (done ? 0.0 : 1.0) - v_curr;
}

double eta(const FracTdConfig& config) {
  return config.eta_variant == EtaVariant::PaperLiteral ? config.constants.eta
                                                        : 1.0;
}

double mu(std::uint64_t t, const FracTdConfig& config) {
  if (t == 0) return 0.0;
  const double a = config.alpha;
  const double td = static_cast<double>(t);
  switch (config.mu_variant) {
    case MuVariant::Theorem:
      return std::pow((td - 1.0 + a) / td, a);
    case MuVariant::Algorithm: {
      const double eps = config.eps_tol;
      return std::exp(a * (std::log(td + eps) - std::log(td - 1.0 + a + eps)));
    }
    case MuVariant::Derivation:
      return std::max(0.0, 1.0 - (1.0 + a) / td);
    case MuVariant::Memoryless:
      return 0.0;
  }
  return 0.0;
}

double clip_bound(std::uint64_t t, double max_abs_delta,
                  const FracTdConfig& config) {
  const auto& c = config.constants;
  return c.c_alpha * max_abs_delta +
         c.kappa * std::pow(static_cast<double>(t) + 1.0, -config.alpha - 1.0);
}

std::pair<FracTdState, double> recursive_step(const FracTdState& state,
                                              double delta,
                                              const FracTdConfig& config) {
  if (!std::isfinite(delta)) {
    throw std::invalid_argument("recursive_step: non-finite TD-error");
  }
  double value = eta(config) * delta;
  if (state.t > 0) value += mu(state.t, config) * state.prev_frac_delta;

  FracTdState next = state;
  next.max_abs_delta = std::max(state.max_abs_delta, std::abs(delta));
  if (config.clipping_enabled) {
    const double bound = clip_bound(state.t, next.max_abs_delta, config);
    if (std::abs(value) > bound) {
      value = std::copysign(bound, value);
      ++next.clip_events;
    }
  }
  next.prev_frac_delta = value;
  next.t = state.t + 1;
  return {next, value};
}

std::vector<double> exact_frac_td(std::span<const double> deltas,
                                  double alpha) {
  return fir_frac_td(deltas, alpha, deltas.size());
}

std::vector<double> fir_frac_td(std::span<const double> deltas, double alpha,
                                std::size_t window) {
  if (window == 0) throw std::invalid_argument("fir_frac_td: window >= 1");
  const auto w = math::gl_weights(alpha, deltas.empty() ? 0 : deltas.size());
  std::vector<double> out(deltas.size());
  for (std::size_t t = 0; t < deltas.size(); ++t) {
    const std::size_t kmax = std::min(t, window - 1);
    double acc = 0.0;
    for (std::size_t k = 0; k <= kmax; ++k) acc += w[k] * deltas[t - k];
    out[t] = acc;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string VariantChoice::label() const {
  return to_string(mu) + "/" + to_string(eta);
}

std::vector<VariantChoice> all_variants() {
  std::vector<VariantChoice> out;
  for (auto m : {MuVariant::Theorem, MuVariant::Algorithm,
                 MuVariant::Derivation}) {
    for (auto e : {EtaVariant::PaperLiteral, EtaVariant::GlConsistent}) {
      out.push_back({m, e});
    }
  }
  return out;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double nd = static_cast<double>(n);
  const double denom = nd * sxx - sx * sx;
  return denom == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                      : (nd * sxy - sx * sy) / denom;
}

const VariantSeries& FidelityReport::best_variant() const {
  if (variants.empty()) throw std::logic_error("report has no variants");
  return *std::min_element(
      variants.begin(), variants.end(),
      [](const auto& a, const auto& b) { return a.slope < b.slope; });
}

double FidelityReport::decile_growth(const std::vector<double>& step_time_ns) {
  const std::size_t n = step_time_ns.size();
  const std::size_t d = n / 10;
  if (d == 0) return std::numeric_limits<double>::quiet_NaN();
  double first = 0, last = 0;
  for (std::size_t i = 0; i < d; ++i) {
    first += step_time_ns[i];
    last += step_time_ns[n - d + i];
  }
  return last / first;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ns(Clock::time_point start, Clock::time_point stop) {
  return static_cast<double>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start)
          .count());
}

double fit_slope(const std::vector<double>& err, double start_fraction) {
  const std::size_t n = err.size();
  const std::size_t first =
      std::max<std::size_t>(1, static_cast<std::size_t>(start_fraction * n));
  std::vector<double> x, y;
  for (std::size_t t = first; t < n; ++t) {
    x.push_back(static_cast<double>(t));
    y.push_back(err[t]);
  }
  return log_log_slope(x, y);
}

// Convolution step with optional truncation, timed across all sequences.
void convolution_pass(const std::vector<std::vector<double>>& deltas,
                      std::span<const double> w, std::size_t window,
                      std::vector<std::vector<double>>& out,
                      VariantSeries& series) {
  const std::size_t seeds = deltas.size();
  const std::size_t horizon = deltas.front().size();
  series.step_time_ns.assign(horizon, 0.0);
  for (std::size_t t = 0; t < horizon; ++t) {
    const std::size_t kmax = std::min(t, window - 1);
    const auto start = Clock::now();
    for (std::size_t s = 0; s < seeds; ++s) {
      const double* d = deltas[s].data();
      double acc = 0.0;
      for (std::size_t k = 0; k <= kmax; ++k) acc += w[k] * d[t - k];
      out[s][t] = acc;
    }
    series.step_time_ns[t] =
        elapsed_ns(start, Clock::now()) / static_cast<double>(seeds);
  }
}

}  // namespace

FidelityReport kernel_fidelity_report(double alpha, std::size_t horizon,
                                      std::size_t seeds,
                                      const std::vector<VariantChoice>& variants,
                                      const FidelityOptions& options) {
  math::require_open_unit(alpha, "alpha");
  if (horizon == 0 || seeds == 0) {
    throw std::invalid_argument("kernel_fidelity_report: empty workload");
  }
  FidelityReport report;
  report.alpha = alpha;
  report.horizon = horizon;
  report.seeds = seeds;

  Rng rng(options.seed);
  std::vector<std::vector<double>> deltas(seeds, std::vector<double>(horizon));
  for (auto& seq : deltas) {
    Rng seq_rng(rng.split());
    for (auto& d : seq) d = seq_rng.uniform(-1.0, 1.0);
  }

  // Running sup-norm, averaged over sequences, for the error-bound column.
  std::vector<double> mean_sup(horizon, 0.0);
  for (const auto& seq : deltas) {
    double m = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      m = std::max(m, std::abs(seq[t]));
      mean_sup[t] += m / static_cast<double>(seeds);
    }
  }
  const auto constants = math::stabilization_constants(alpha);
  std::vector<double> bound(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    const double tt = std::max<double>(1.0, static_cast<double>(t));
    bound[t] = constants.kappa * std::pow(tt, -alpha - 1.0) * mean_sup[t];
  }

  const auto weights = math::gl_weights(alpha, horizon);
  std::vector<std::vector<double>> exact(seeds, std::vector<double>(horizon));
  report.naive.label = "naive";
  convolution_pass(deltas, weights.values(), horizon, exact, report.naive);
  report.naive.abs_error.assign(horizon, 0.0);
  report.naive.bound_value = bound;

  const std::size_t window = std::max<std::size_t>(1, options.fir_window);
  std::vector<std::vector<double>> fir(seeds, std::vector<double>(horizon));
  report.fir.label = "fir" + std::to_string(window);
  convolution_pass(deltas, weights.values(), window, fir, report.fir);
  report.fir.abs_error.assign(horizon, 0.0);
  for (std::size_t s = 0; s < seeds; ++s) {
    for (std::size_t t = 0; t < horizon; ++t) {
      report.fir.abs_error[t] +=
          std::abs(fir[s][t] - exact[s][t]) / static_cast<double>(seeds);
    }
  }
  report.fir.bound_value = bound;
  report.fir.slope = fit_slope(report.fir.abs_error, options.fit_start_fraction);

  for (const auto& choice : variants) {
    const auto config = make_frac_td_config(alpha, choice.mu, choice.eta,
                                            options.clipping);
    VariantSeries series;
    series.label = choice.label();
    series.abs_error.assign(horizon, 0.0);
    series.step_time_ns.assign(horizon, 0.0);
    series.bound_value = bound;
    std::vector<FracTdState> states(seeds);
    std::vector<double> outputs(seeds);
    for (std::size_t t = 0; t < horizon; ++t) {
      const auto start = Clock::now();
      for (std::size_t s = 0; s < seeds; ++s) {
        auto [next, value] = recursive_step(states[s], deltas[s][t], config);
        states[s] = next;
        outputs[s] = value;
      }
      series.step_time_ns[t] =
          elapsed_ns(start, Clock::now()) / static_cast<double>(seeds);
      for (std::size_t s = 0; s < seeds; ++s) {
        series.abs_error[t] +=
            std::abs(outputs[s] - exact[s][t]) / static_cast<double>(seeds);
        if (config.clipping_enabled &&
            std::abs(outputs[s]) >
                clip_bound(t, states[s].max_abs_delta, config)) {
          ++series.bound_violations;
        }
      }
    }
    for (const auto& st : states) series.clip_events += st.clip_events;
    series.slope = fit_slope(series.abs_error, options.fit_start_fraction);
    report.variants.push_back(std::move(series));
  }
  return report;
}

void write_fidelity_csv(std::ostream& out, const FidelityReport& report) {
  out << "variant,t,abs_error,bound_value,step_time_ns\n";
  auto emit = [&](const VariantSeries& s) {
    for (std::size_t t = 0; t < s.abs_error.size(); ++t) {
      out << s.label << ',' << t << ',' << s.abs_error[t] << ','
          << s.bound_value[t] << ',' << s.step_time_ns[t] << '\n';
    }
  };
  emit(report.naive);
  emit(report.fir);
  for (const auto& v : report.variants) emit(v);
}

}  // namespace fpg::td
