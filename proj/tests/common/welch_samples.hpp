#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace fpg::testdata {

/// n values with sample mean `mean` and unbiased sample variance `var`
/// exactly (up to rounding): a fixed zig-zag pattern, centred and rescaled.
inline std::vector<double> standardized_sample(std::size_t n, double mean, double var) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = static_cast<double>((i * 7) % 11) - 0.37 * static_cast<double>(i % 3);
  }
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double scale = std::sqrt(var * static_cast<double>(n - 1) / ss);
  for (double& x : v) x = mean + (x - m) * scale;
  return v;
}

}  // namespace fpg::testdata
