#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpg/frac_math.hpp"

namespace fpg::td {

/// Which decay factor mu_t drives the recursion.
enum class MuVariant {
  Theorem,     // ((t - 1 + alpha) / t)^alpha
  Algorithm,   // exp(alpha [ln(t + eps) - ln(t - 1 + alpha + eps)])
  Derivation,  // max(0, 1 - (1 + alpha) / t)
  Memoryless,  // 0: no history term; used for baseline equivalence checks
};

/// Coefficient on the current TD-error.
enum class EtaVariant {
  PaperLiteral,  // 1 / Gamma(1 - alpha)
  GlConsistent,  // 1, matching w_0
};

std::string to_string(MuVariant v);
std::string to_string(EtaVariant v);
MuVariant parse_mu_variant(const std::string& s);
EtaVariant parse_eta_variant(const std::string& s);

struct FracTdConfig {
  double alpha = 0.7;
  MuVariant mu_variant = MuVariant::Theorem;
  EtaVariant eta_variant = EtaVariant::PaperLiteral;
  double eps_tol = 1e-8;
  bool clipping_enabled = true;
  math::StabilizationConstants constants;
};

/// Builds a config with constants computed for `alpha`.
FracTdConfig make_frac_td_config(double alpha,
                                 MuVariant mu = MuVariant::Theorem,
                                 EtaVariant eta = EtaVariant::PaperLiteral,
                                 bool clipping = true, double eps_tol = 1e-8);

/// Constant-size recursion state. Reset at every episode boundary.
struct FracTdState {
  double prev_frac_delta = 0.0;
  std::uint64_t t = 0;
  double max_abs_delta = 0.0;
  std::uint64_t clip_events = 0;
};

/// One-step TD-error r + gamma V(s') [masked at terminals] - V(s).
double td_error(double reward, double v_next, double v_curr, double gamma,
                bool done);

double eta(const FracTdConfig& config);
/// Decay factor at step t (t >= 1). Returns 0 for t == 0.
double mu(std::uint64_t t, const FracTdConfig& config);
/// Stability bound c_alpha * max_abs_delta + kappa (t + 1)^{-alpha - 1}.
double clip_bound(std::uint64_t t, double max_abs_delta,
                  const FracTdConfig& config);

/// Advances the recursion by one TD-error. Returns the new state and the
/// (possibly clipped) fractional TD-error for step `state.t`.
std::pair<FracTdState, double> recursive_step(const FracTdState& state,
                                              double delta,
                                              const FracTdConfig& config);

/// Full O(t^2) convolution with the GL weights.
std::vector<double> exact_frac_td(std::span<const double> deltas,
                                  double alpha);

/// Convolution truncated to the `window` most recent weights.
std::vector<double> fir_frac_td(std::span<const double> deltas, double alpha,
                                std::size_t window);

// ---------------------------------------------------------------------------
// Kernel fidelity report

struct VariantChoice {
  MuVariant mu = MuVariant::Theorem;
  EtaVariant eta = EtaVariant::PaperLiteral;
  std::string label() const;
};

std::vector<VariantChoice> all_variants();

struct FidelityOptions {
  bool clipping = true;
  std::size_t fir_window = 64;
  std::uint64_t seed = 12345;
  /// Errors are averaged over t in [fit_start_fraction * horizon, horizon).
  double fit_start_fraction = 0.1;
};

struct VariantSeries {
  std::string label;
  std::vector<double> abs_error;     // mean over sequences, per t
  std::vector<double> bound_value;   // kappa t^{-alpha-1} mean ||delta||_inf
  std::vector<double> step_time_ns;  // per sequence per step
  double slope = 0.0;                // log-log fit of abs_error over t
  std::uint64_t clip_events = 0;
  std::uint64_t bound_violations = 0;
};

struct FidelityReport {
  double alpha = 0.0;
  std::size_t horizon = 0;
  std::size_t seeds = 0;
  std::vector<VariantSeries> variants;  // recursive variants
  VariantSeries naive;                  // exact convolution (error 0)
  VariantSeries fir;
  std::size_t state_bytes = sizeof(FracTdState);

  const VariantSeries& best_variant() const;
  /// Mean per-step time over the last decile divided by the first decile.
  static double decile_growth(const std::vector<double>& step_time_ns);
};

FidelityReport kernel_fidelity_report(double alpha, std::size_t horizon,
                                      std::size_t seeds,
                                      const std::vector<VariantChoice>& variants,
                                      const FidelityOptions& options = {});

/// CSV with columns variant,t,abs_error,bound_value,step_time_ns.
void write_fidelity_csv(std::ostream& out, const FidelityReport& report);

/// Least-squares slope of log(y) against log(x) over points with y > 0.
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace fpg::td
