#include "fpg/frac_math.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace fpg::math {
namespace {

// Lanczos, g = 5.
constexpr std::array<double, 7> kLanczos = {
    1.000000000190015,     76.18009172947146,      -86.50532032941677,
    24.01409824083091,     -1.231739572450155,     0.001208650973866179,
    -5.395239384953e-6,
};
constexpr double kLanczosShift = 5.5;  // g + 1/2

// S(z) / z, so that Gamma(z) = sqrt(2 pi) (z + 5.5)^{z + 1/2}
// e^{-(z + 5.5)} * series_over_z(z).
double series_over_z(double z) {
  double ser = kLanczos[0];
  for (std::size_t k = 1; k < kLanczos.size(); ++k) {
    ser += kLanczos[k] / (z + static_cast<double>(k));
  }
  return ser / z;
}

bool is_pole(double z) {
  return z <= 0.0 && std::abs(z - std::round(z)) < 1e-12;
}

// ln Gamma(a) - ln Gamma(b) for a, b > 0 without forming the two large
// logarithms separately.
double log_gamma_ratio(double a, double b) {
  const double big_b = b + kLanczosShift;
  const double diff = a - b;
  const double power_terms =
      (a + 0.5) * std::log1p(diff / big_b) + diff * std::log(big_b);
  return power_terms - diff + std::log(series_over_z(a) / series_over_z(b));
}

}  // namespace

void require_open_unit(double alpha, const char* what) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError(std::string(what) + " must lie in (0,1), got " +
                      std::to_string(alpha));
  }
}

double gamma(double z) {
  if (std::isnan(z) || is_pole(z)) {
    throw DomainError("gamma: pole at z = " + std::to_string(z));
  }
  if (z < 0.0) {
    return std::numbers::pi /
           (std::sin(std::numbers::pi * z) * gamma(1.0 - z));
  }
  const double tmp = z + kLanczosShift;
  return std::sqrt(2.0 * std::numbers::pi) * series_over_z(z) *
         std::exp((z + 0.5) * std::log(tmp) - tmp);
}

double log_gamma(double z) {
  if (!(z > 0.0)) {
    throw DomainError("log_gamma: requires z > 0");
  }
  const double tmp = z + kLanczosShift;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(tmp) -
         tmp + std::log(series_over_z(z));
}

double zeta(double s) {
  if (!(s > 1.0)) {
    throw DomainError("zeta: requires s > 1");
  }
  constexpr int kTerms = 1'000'000;
  // Smallest terms first.
  KahanSum acc;
  for (int n = kTerms - 1; n >= 1; --n) {
    acc += std::pow(static_cast<double>(n), -s);
  }
  // Euler-Maclaurin tail for sum_{n >= N} n^{-s}.
  const double big_n = kTerms;
  const double n_pow = std::pow(big_n, -s);
  double tail = big_n * n_pow / (s - 1.0) + 0.5 * n_pow;
  tail += s * n_pow / (12.0 * big_n);
  tail -= s * (s + 1.0) * (s + 2.0) * n_pow / (720.0 * big_n * big_n * big_n);
  acc += tail;
  return acc.value();
}

double kahan_sum(std::span<const double> values) {
  KahanSum acc;
  for (double v : values) acc += v;
  return acc.value();
}

FracWeights::FracWeights(double alpha) : alpha_(alpha), weights_{1.0} {
  require_open_unit(alpha, "alpha");
}

void FracWeights::extend_to(std::size_t n) {
  if (n + 1 <= weights_.size()) return;
  weights_.reserve(n + 1);
  for (std::size_t k = weights_.size(); k <= n; ++k) {
    weights_.push_back(weights_[k - 1] *
                       (1.0 - (alpha_ + 1.0) / static_cast<double>(k)));
  }
}

double FracWeights::at(std::size_t k) {
  extend_to(k);
  return weights_[k];
}

FracWeights gl_weights(double alpha, std::size_t n) {
  FracWeights w(alpha);
  w.extend_to(n);
  return w;
}

double gl_weight_direct(double alpha, std::size_t k) {
  require_open_unit(alpha, "alpha");
  if (k == 0) return 1.0;
  const double kd = static_cast<double>(k);
  return std::exp(log_gamma_ratio(kd - alpha, kd + 1.0)) / gamma(-alpha);
}

double gl_weight_asymptotic(double alpha, std::size_t k) {
  require_open_unit(alpha, "alpha");
  if (k == 0) throw DomainError("gl_weight_asymptotic: requires k >= 1");
  const double kd = static_cast<double>(k);
  return std::pow(kd, -alpha - 1.0) / gamma(-alpha) *
         (1.0 + alpha * (alpha + 1.0) / (2.0 * kd));
}

double gl_partial_sum_closed_form(double alpha, std::size_t n) {
  require_open_unit(alpha, "alpha");
  if (n == 0) return 1.0;
  const double nd = static_cast<double>(n);
  return std::exp(log_gamma_ratio(nd + 1.0 - alpha, nd + 1.0)) /
         gamma(1.0 - alpha);
}

RlKernels::RlKernels(double alpha) : alpha_(alpha), kernels_{1.0} {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("rl_kernels: alpha must lie in (0,1]");
  }
}

void RlKernels::extend_to(std::size_t n) {
  if (n + 1 <= kernels_.size()) return;
  kernels_.reserve(n + 1);
  for (std::size_t k = kernels_.size(); k <= n; ++k) {
    const double kd = static_cast<double>(k);
    kernels_.push_back(kernels_[k - 1] * (kd - 1.0 + alpha_) / kd);
  }
}

RlKernels rl_kernels(double alpha, std::size_t n) {
  RlKernels psi(alpha);
  psi.extend_to(n);
  return psi;
}

double rl_kernel_direct(double alpha, std::size_t k) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("rl_kernel_direct: alpha must lie in (0,1]");
  }
  if (k == 0) return 1.0;
  const double kd = static_cast<double>(k);
  return std::exp(log_gamma_ratio(kd + alpha, kd + 1.0)) / gamma(alpha);
}

StabilizationConstants stabilization_constants(double alpha, double eps_tol) {
  require_open_unit(alpha, "alpha");
  if (!(eps_tol > 0.0)) throw DomainError("eps_tol must be positive");
  StabilizationConstants c;
  c.alpha = alpha;
  c.eta = 1.0 / gamma(1.0 - alpha);
  c.c_alpha = zeta(1.0 + alpha) / std::abs(gamma(-alpha));
  c.kappa = alpha * (1.0 - alpha) / (2.0 * gamma(2.0 - alpha));
  c.eps_tol = eps_tol;
  return c;
}

}  // namespace fpg::math
