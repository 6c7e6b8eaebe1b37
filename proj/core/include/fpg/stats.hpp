#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fpg::stats {

class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// First 1-based episode at which the trailing `window`-episode mean return
/// reaches `threshold`; nullopt if it never does.
std::optional<std::size_t> episodes_to_threshold(std::span<const double> returns,
                                                 double threshold,
                                                 std::size_t window = 10);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// Two-sided tail probability of Student's t with `dof` degrees of freedom.
double student_t_two_sided(double t, double dof);

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 1.0;  // two-sided
  double mean_a = 0.0;
  double mean_b = 0.0;

  /// p-value for the alternative mean_a < mean_b.
  double p_less() const;
  /// p-value for the alternative mean_a > mean_b.
  double p_greater() const;
};

/// Welch's unequal-variance t-test with Satterthwaite degrees of freedom.
/// Two constant samples with equal means give t = 0, p = 1; with different
/// means the statistic is infinite and InsufficientData is thrown.
WelchResult welch_t(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> v);
/// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> v);
double median(std::vector<double> v);

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 sd / sqrt(n)
  double lo() const { return mean - half_width; }
  double hi() const { return mean + half_width; }
};

ConfidenceInterval normal_ci95(std::span<const double> v);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least-squares fit of log(var) against log(t) over the second half of the
/// series (ordered by t). Needs >= 20 points with positive t and variance.
DecayFit variance_decay_fit(std::span<const std::pair<double, double>> series);

struct BiasVariance {
  double bias_sq = 0.0;
  double variance = 0.0;
};

/// bias^2 = ||mean(samples) - reference||^2,
/// variance = mean ||sample - mean(samples)||^2.
BiasVariance bias_variance_estimate(const std::vector<std::vector<double>>& samples,
                                    std::span<const double> reference);

}  // namespace fpg::stats
