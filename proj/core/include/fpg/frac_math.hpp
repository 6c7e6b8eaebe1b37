#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fpg::math {

/// Thrown when an argument falls outside a function's domain (poles of
/// gamma, s <= 1 for zeta, alpha outside (0,1)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Gamma function. Lanczos (g = 5, 7 coefficients) for z > 0 and the
/// reflection formula for negative non-integer z.
double gamma(double z);

/// log|Gamma(z)| for z > 0, same Lanczos table. Used where Gamma overflows.
double log_gamma(double z);

/// Riemann zeta for real s > 1.
double zeta(double s);

/// Compensated accumulator.
///
/// Tracks the rounding error of each addition and feeds it back into the
/// next one, so the error of the final sum does not grow with the number
/// of terms.
struct KahanSum {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double value) {
    const double y = value - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  }
  KahanSum& operator+=(double value) {
    add(value);
    return *this;
  }
  double value() const { return sum; }
};

double kahan_sum(std::span<const double> values);

/// Grünwald-Letnikov weights w_k = (-1)^k binom(alpha, k), generated by
/// w_0 = 1, w_k = w_{k-1} (1 - (alpha + 1) / k). Extended lazily.
class FracWeights {
 public:
  explicit FracWeights(double alpha);

  double alpha() const { return alpha_; }
  /// Highest index currently materialized.
  std::size_t n() const { return weights_.size() - 1; }
  /// Grows the cache so that index `n` is available.
  void extend_to(std::size_t n);
  /// Weight at index k, extending the cache if needed.
  double at(std::size_t k);
  double operator[](std::size_t k) const { return weights_[k]; }
  std::span<const double> values() const { return weights_; }

 private:
  double alpha_;
  std::vector<double> weights_;
};

FracWeights gl_weights(double alpha, std::size_t n);

/// Same weight through the gamma-ratio form Gamma(k - alpha) /
/// (Gamma(-alpha) Gamma(k + 1)), evaluated in log space for large k.
double gl_weight_direct(double alpha, std::size_t k);

/// Two-term large-k expansion k^{-alpha-1} / Gamma(-alpha) *
/// (1 + alpha (alpha + 1) / (2k)).
double gl_weight_asymptotic(double alpha, std::size_t k);

/// (-1)^n binom(alpha - 1, n), the closed form of sum_{k<=n} w_k.
double gl_partial_sum_closed_form(double alpha, std::size_t n);

/// Riemann-Liouville kernels psi_k = Gamma(k + alpha) / (Gamma(alpha) k!),
/// generated by psi_0 = 1, psi_k = psi_{k-1} (k - 1 + alpha) / k.
class RlKernels {
 public:
  explicit RlKernels(double alpha);

  double alpha() const { return alpha_; }
  std::size_t n() const { return kernels_.size() - 1; }
  void extend_to(std::size_t n);
  double operator[](std::size_t k) const { return kernels_[k]; }
  std::span<const double> values() const { return kernels_; }

 private:
  double alpha_;
  std::vector<double> kernels_;
};

RlKernels rl_kernels(double alpha, std::size_t n);

double rl_kernel_direct(double alpha, std::size_t k);

/// Constants used by the stabilized fractional recursion.
struct StabilizationConstants {
  double alpha = 0.0;
  double eta = 0.0;      // 1 / Gamma(1 - alpha)
  double c_alpha = 0.0;  // zeta(1 + alpha) / |Gamma(-alpha)|
  double kappa = 0.0;    // alpha (1 - alpha) / (2 Gamma(2 - alpha))
  double eps_tol = 1e-8;
};

StabilizationConstants stabilization_constants(double alpha,
                                               double eps_tol = 1e-8);

/// Throws DomainError unless 0 < alpha < 1.
void require_open_unit(double alpha, const char* what);

}  // namespace fpg::math
