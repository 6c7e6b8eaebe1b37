#include "fpg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fpg/frac_math.hpp"

namespace fpg::stats {

std::optional<std::size_t> episodes_to_threshold(std::span<const double> returns,
                                                 double threshold,
                                                 std::size_t window) {
  if (returns.empty()) throw InsufficientData("episodes_to_threshold: no returns");
  if (window == 0) throw std::invalid_argument("episodes_to_threshold: window >= 1");
  double sum = 0.0;
  for (std::size_t i = 0; i < returns.size(); ++i) {
    sum += returns[i];
    if (i >= window) sum -= returns[i - window];
    if (i + 1 >= window && sum / static_cast<double>(window) >= threshold) {
      return i + 1;
    }
  }
  return std::nullopt;
}

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double md = m;
    const double m2 = 2.0 * md;
    double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b > 0");
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete_beta: x in [0,1]");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The continued fraction converges fastest on this side of the mean.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("student_t: dof > 0");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

double WelchResult::p_less() const { return t <= 0.0 ? 0.5 * p : 1.0 - 0.5 * p; }

double WelchResult::p_greater() const { return t >= 0.0 ? 0.5 * p : 1.0 - 0.5 * p; }

double mean(std::span<const double> v) {
  if (v.empty()) throw InsufficientData("mean of empty sample");
  return math::kahan_sum(v) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) throw InsufficientData("variance needs >= 2 values");
  const double m = mean(v);
  math::KahanSum ss;
  for (double x : v) ss += (x - m) * (x - m);
  return ss.value() / static_cast<double>(v.size() - 1);
}

double median(std::vector<double> v) {
  if (v.empty()) throw InsufficientData("median of empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw InsufficientData("welch_t: each sample needs >= 2 values");
  }
  WelchResult r;
  r.mean_a = mean(a);
  r.mean_b = mean(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = sample_variance(a) / na;
  const double vb = sample_variance(b) / nb;
  if (va + vb == 0.0) {
    if (r.mean_a == r.mean_b) {
      r.t = 0.0;
      r.dof = na + nb - 2.0;
      r.p = 1.0;
      return r;
    }
    throw InsufficientData("welch_t: zero variance with distinct means");
  }
  r.t = (r.mean_a - r.mean_b) / std::sqrt(va + vb);
  r.dof = (va + vb) * (va + vb) /
          (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p = student_t_two_sided(r.t, r.dof);
  return r;
}

ConfidenceInterval normal_ci95(std::span<const double> v) {
  ConfidenceInterval ci;
  ci.mean = mean(v);
  ci.half_width =
      v.size() < 2 ? 0.0
                   : 1.96 * std::sqrt(sample_variance(v)) /
                         std::sqrt(static_cast<double>(v.size()));
  return ci;
}

DecayFit variance_decay_fit(std::span<const std::pair<double, double>> series) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [t, var] : series) {
    if (t > 0.0 && var > 0.0) pts.emplace_back(t, var);
  }
  if (pts.size() < 20) {
    throw InsufficientData("variance_decay_fit: needs >= 20 positive points");
  }
  std::stable_sort(pts.begin(), pts.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  const std::size_t start = pts.size() / 2;
  const std::size_t n = pts.size() - start;
  double sx = 0, sy = 0;
  for (std::size_t i = start; i < pts.size(); ++i) {
    sx += std::log(pts[i].first);
    sy += std::log(pts[i].second);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = start; i < pts.size(); ++i) {
    const double dx = std::log(pts[i].first) - mx;
    const double dy = std::log(pts[i].second) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  DecayFit fit;
  fit.points = n;
  if (sxx == 0.0) throw InsufficientData("variance_decay_fit: degenerate t values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

BiasVariance bias_variance_estimate(const std::vector<std::vector<double>>& samples,
                                    std::span<const double> reference) {
  if (samples.size() < 2) throw InsufficientData("bias_variance: needs >= 2 samples");
  const std::size_t dim = reference.size();
  std::vector<double> m(dim, 0.0);
  for (const auto& s : samples) {
    if (s.size() != dim) throw std::invalid_argument("bias_variance: dimension mismatch");
    for (std::size_t i = 0; i < dim; ++i) m[i] += s[i];
  }
  for (double& x : m) x /= static_cast<double>(samples.size());
  BiasVariance out;
  for (std::size_t i = 0; i < dim; ++i) {
    out.bias_sq += (m[i] - reference[i]) * (m[i] - reference[i]);
  }
  math::KahanSum var;
  for (const auto& s : samples) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) d2 += (s[i] - m[i]) * (s[i] - m[i]);
    var += d2;
  }
  out.variance = var.value() / static_cast<double>(samples.size());
  return out;
}

}  // namespace fpg::stats
