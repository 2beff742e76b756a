#pragma once

#include <cstddef>
#include <span>

namespace strataboot::detail {

inline double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Divisor (n - 1); two-pass around the supplied mean.
inline double sample_variance(std::span<const double> x, double mu) {
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return s / static_cast<double>(x.size() - 1);
}

inline double sample_covariance(std::span<const double> x, double mx, std::span<const double> y,
                                double my) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
  return s / static_cast<double>(x.size() - 1);
}

}  // namespace strataboot::detail
