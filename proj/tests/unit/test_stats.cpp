#include <gtest/gtest.h>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "fpg/stats.hpp"
#include "welch_samples.hpp"

namespace st = fpg::stats;

TEST(EpisodesToThreshold, WindowDefinition) {
  const std::vector<double> solved(30, 500.0);
  EXPECT_EQ(st::episodes_to_threshold(solved, 200.0), 10u);
  const std::vector<double> low(30, 100.0);
  EXPECT_FALSE(st::episodes_to_threshold(low, 200.0).has_value());
  std::vector<double> ramp(40, 0.0);
  for (std::size_t i = 20; i < 40; ++i) ramp[i] = 400.0;
  // Trailing mean first reaches 200 when five of ten entries are 400.
  EXPECT_EQ(st::episodes_to_threshold(ramp, 200.0), 25u);
  EXPECT_THROW(st::episodes_to_threshold(std::vector<double>{}, 1.0), st::InsufficientData);
  const std::vector<double> short_run(5, 1000.0);
  EXPECT_FALSE(st::episodes_to_threshold(short_run, 200.0).has_value());
}

TEST(IncompleteBeta, MatchesBoost) {
  double worst = 0.0;
  for (double a : {0.5, 1.0, 2.5, 9.5, 19.0, 60.0}) {
    for (double b : {0.5, 1.0, 3.0, 12.0}) {
      for (int i = 1; i < 50; ++i) {
        const double x = i / 50.0;
        worst = std::max(worst, std::abs(st::incomplete_beta(a, b, x) - boost::math::ibeta(a, b, x)));
      }
    }
  }
  EXPECT_LT(worst, 1e-8);
  EXPECT_EQ(st::incomplete_beta(2.0, 3.0, 0.0), 0.0);
  EXPECT_EQ(st::incomplete_beta(2.0, 3.0, 1.0), 1.0);
  EXPECT_THROW(st::incomplete_beta(0.0, 1.0, 0.5), std::invalid_argument);
}

TEST(StudentT, TwoSidedTailMatchesBoost) {
  for (double dof : {1.0, 4.5, 38.0, 200.0}) {
    boost::math::students_t dist(dof);
    for (double t : {0.0, 0.3, 1.0, 2.0, 3.162, 6.0}) {
      const double want = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
      EXPECT_NEAR(st::student_t_two_sided(t, dof), want, 1e-8);
      EXPECT_NEAR(st::student_t_two_sided(-t, dof), want, 1e-8);
    }
  }
}

TEST(Welch, TextbookCase) {
  const auto a = fpg::testdata::standardized_sample(20, 0.0, 1.0);
  const auto b = fpg::testdata::standardized_sample(20, 1.0, 1.0);
  EXPECT_NEAR(st::mean(a), 0.0, 1e-12);
  EXPECT_NEAR(st::sample_variance(b), 1.0, 1e-12);
  const auto r = st::welch_t(a, b);
  EXPECT_NEAR(r.t, -std::sqrt(10.0), 1e-9);
  EXPECT_NEAR(r.t, -3.162, 1e-3);
  EXPECT_NEAR(r.dof, 38.0, 1e-9);
  boost::math::students_t dist(38.0);
  EXPECT_NEAR(r.p, 2.0 * boost::math::cdf(dist, r.t), 1e-8);
  EXPECT_NEAR(r.p_less(), boost::math::cdf(dist, r.t), 1e-8);
  EXPECT_NEAR(r.p_greater(), 1.0 - boost::math::cdf(dist, r.t), 1e-8);
}

TEST(Welch, BruteForceFormulaOnUnequalSamples) {
  const std::vector<double> a = {1.2, 3.4, 2.2, 5.1, 0.3, 2.8, 4.4};
  const std::vector<double> b = {7.1, 6.3, 9.9, 4.2};
  auto mv = [](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= v.size();
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, s / (v.size() - 1)};
  };
  const auto [ma, va] = mv(a);
  const auto [mb, vb] = mv(b);
  const double sa = va / a.size(), sb = vb / b.size();
  const double t = (ma - mb) / std::sqrt(sa + sb);
  const double dof = (sa + sb) * (sa + sb) / (sa * sa / (a.size() - 1) + sb * sb / (b.size() - 1));
  const auto r = st::welch_t(a, b);
  EXPECT_NEAR(r.t, t, 1e-12);
  EXPECT_NEAR(r.dof, dof, 1e-10);
}

TEST(Welch, IdenticalSamplesAndAntisymmetry) {
  const std::vector<double> a = {1.0, 2.0, 3.5, 0.5};
  const auto same = st::welch_t(a, a);
  EXPECT_EQ(same.t, 0.0);
  EXPECT_NEAR(same.p, 1.0, 1e-12);

  const std::vector<double> b = {2.0, 4.0, 3.0, 5.5, 4.1};
  const auto ab = st::welch_t(a, b);
  const auto ba = st::welch_t(b, a);
  EXPECT_DOUBLE_EQ(ab.t, -ba.t);
  EXPECT_DOUBLE_EQ(ab.p, ba.p);
  EXPECT_DOUBLE_EQ(ab.dof, ba.dof);
}

TEST(Welch, PValueFallsWithMeanGap) {
  const auto a = fpg::testdata::standardized_sample(15, 0.0, 1.0);
  double prev = 1.1;
  for (int k = 0; k <= 20; ++k) {
    const auto b = fpg::testdata::standardized_sample(15, 0.1 * k, 1.0);
    const double p = st::welch_t(a, b).p;
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(Welch, DegenerateSamples) {
  const std::vector<double> c = {2.0, 2.0, 2.0};
  const auto r = st::welch_t(c, c);
  EXPECT_EQ(r.p, 1.0);
  const std::vector<double> d = {3.0, 3.0};
  EXPECT_THROW(st::welch_t(c, d), st::InsufficientData);
  EXPECT_THROW(st::welch_t(std::vector<double>{1.0}, c), st::InsufficientData);
}

TEST(ConfidenceInterval, NormalApproximation) {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8};
  const auto ci = st::normal_ci95(v);
  EXPECT_DOUBLE_EQ(ci.mean, 4.5);
  EXPECT_NEAR(ci.half_width, 1.96 * std::sqrt(st::sample_variance(v)) / std::sqrt(8.0), 1e-15);
  EXPECT_LT(ci.lo(), ci.hi());
}

TEST(Median, OddEven) {
  EXPECT_EQ(st::median({3, 1, 2}), 2.0);
  EXPECT_EQ(st::median({4, 1, 3, 2}), 2.5);
}

namespace {

std::vector<std::pair<double, double>> power_series(double slope, double noise, std::uint64_t seed,
                                                    int n = 400) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<std::pair<double, double>> s;
  for (int t = 1; t <= n; ++t) {
    s.emplace_back(t, 2.5 * std::pow(t, slope) * (1.0 + noise * z(gen)));
  }
  return s;
}

}  // namespace

TEST(DecayFit, RecoversSyntheticSlopes) {
  EXPECT_NEAR(st::variance_decay_fit(power_series(-0.7, 0.0, 1)).slope, -0.7, 1e-10);
  EXPECT_NEAR(st::variance_decay_fit(power_series(-0.7, 0.0, 1)).r_squared, 1.0, 1e-12);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    EXPECT_NEAR(st::variance_decay_fit(power_series(-0.5, 0.01, seed)).slope, -0.5, 0.05);
    EXPECT_NEAR(st::variance_decay_fit(power_series(-0.7, 0.01, seed)).slope, -0.7, 0.05);
  }
}

TEST(DecayFit, ConstantSeriesAndScaleInvariance) {
  std::vector<std::pair<double, double>> flat;
  for (int t = 1; t <= 50; ++t) flat.emplace_back(t, 4.0);
  EXPECT_NEAR(st::variance_decay_fit(flat).slope, 0.0, 1e-12);

  auto s = power_series(-0.6, 0.05, 3);
  const double base = st::variance_decay_fit(s).slope;
  for (auto& p : s) p.second *= 37.5;
  EXPECT_NEAR(st::variance_decay_fit(s).slope, base, 1e-9);
}

TEST(DecayFit, UsesSecondHalf) {
  std::vector<std::pair<double, double>> s;
  for (int t = 1; t <= 100; ++t) s.emplace_back(t, t <= 50 ? 1.0 : std::pow(t, -1.0));
  EXPECT_NEAR(st::variance_decay_fit(s).slope, -1.0, 1e-10);
}

TEST(DecayFit, InsufficientData) {
  std::vector<std::pair<double, double>> s;
  for (int t = 1; t <= 19; ++t) s.emplace_back(t, 1.0);
  EXPECT_THROW(st::variance_decay_fit(s), st::InsufficientData);
  s.emplace_back(20, 0.0);  // nonpositive variance does not count
  EXPECT_THROW(st::variance_decay_fit(s), st::InsufficientData);
}

TEST(BiasVariance, Examples) {
  const std::vector<double> ref = {1.0, -2.0};
  const auto zero = st::bias_variance_estimate({ref, ref, ref}, ref);
  EXPECT_EQ(zero.bias_sq, 0.0);
  EXPECT_EQ(zero.variance, 0.0);

  const std::vector<double> e = {0.3, 0.4};
  const auto sym = st::bias_variance_estimate(
      {{1.3, -1.6}, {0.7, -2.4}, {1.3, -1.6}, {0.7, -2.4}}, ref);
  EXPECT_NEAR(sym.bias_sq, 0.0, 1e-24);
  EXPECT_NEAR(sym.variance, e[0] * e[0] + e[1] * e[1], 1e-12);

  const auto shifted = st::bias_variance_estimate({{1.5, -1.0}, {1.5, -1.0}}, ref);
  EXPECT_NEAR(shifted.bias_sq, 0.25 + 1.0, 1e-12);
  EXPECT_EQ(shifted.variance, 0.0);
  EXPECT_THROW(st::bias_variance_estimate({ref}, ref), st::InsufficientData);
}
