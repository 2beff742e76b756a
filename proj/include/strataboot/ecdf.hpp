#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace strataboot {

// Empirical distribution function of a finite sample.
//
// F(y) = #{values <= y} / n, right-continuous. The matching quantile function
// is the left-continuous inverse Q(u) = inf{y : F(y) >= u} on (0, 1], so that
// Q(k/n) is exactly the k-th order statistic.
class Ecdf {
 public:
  // Throws EmptySample on an empty sample and NonFiniteOutcome on NaN/Inf.
  explicit Ecdf(std::vector<double> values);

  double operator()(double y) const;
  std::size_t count_at_or_below(double y) const;

  // Throws DomainError unless 0 < u <= 1.
  double quantile(double u) const;

  // Q(num / den) evaluated with integer arithmetic, 0 < num <= den.
  double quantile_at(std::size_t num, std::size_t den) const;

  std::size_t size() const noexcept { return sorted_.size(); }
  std::span<const double> sorted_values() const noexcept { return sorted_; }
  double min() const noexcept { return sorted_.front(); }
  double max() const noexcept { return sorted_.back(); }

 private:
  std::vector<double> sorted_;
};

// Exact value of  integral_0^1 Qg(u) Qf(u) du  for two step quantile functions.
//
// Both inverses are constant between consecutive breakpoints of
// {j/n_g} U {k/n_f}; the integral is the sum over merged segments of
// (segment length) x (product of the two constants). No quadrature.
double quantile_product_integral(const Ecdf& g, const Ecdf& f);

// Same integral over raw ascending samples; the bootstrap inner loop uses this
// to avoid allocating Ecdf objects per replicate.
double quantile_product_integral(std::span<const double> g_sorted,
                                 std::span<const double> f_sorted);

// integral_0^1 (Qg(u) - g_center)(Qf(u) - f_center) du. Centering at the
// sample means keeps the rounding error proportional to the spread of the
// data instead of its magnitude.
double centered_quantile_product_integral(std::span<const double> g_sorted, double g_center,
                                          std::span<const double> f_sorted, double f_center);

// Frechet-Hoeffding upper bound joint CDF, min{G(y1), F(y0)}.
double frechet_upper_joint(const Ecdf& g, const Ecdf& f, double y1, double y0);

}  // namespace strataboot
