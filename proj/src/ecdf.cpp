#include "strataboot/ecdf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "strataboot/error.hpp"

namespace strataboot {

namespace {
constexpr double kEpsilon = 2.220446049250313e-16;
}

Ecdf::Ecdf(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) {
    throw Error(ErrorCode::EmptySample, "cannot build an ECDF from an empty sample");
  }
  for (double v : sorted_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteOutcome, "ECDF sample contains a non-finite value");
    }
  }
  std::stable_sort(sorted_.begin(), sorted_.end());
}

std::size_t Ecdf::count_at_or_below(double y) const {
  return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), y) -
                                  sorted_.begin());
}

double Ecdf::operator()(double y) const {
  return static_cast<double>(count_at_or_below(y)) / static_cast<double>(sorted_.size());
}

double Ecdf::quantile(double u) const {
  if (!(u > 0.0 && u <= 1.0)) {
    throw Error(ErrorCode::DomainError,
                "quantile level must lie in (0, 1], got " + std::to_string(u));
  }
  const double n = static_cast<double>(sorted_.size());
  // n*u can land a few ulps above an integer k when u is the double nearest to
  // k/n; such u still selects the k-th order statistic.
  const double scaled = n * u;
  auto k = static_cast<std::size_t>(std::ceil(scaled));
  if (k > 1 && scaled - static_cast<double>(k - 1) <= 64.0 * kEpsilon * scaled) {
    k -= 1;
  }
  k = std::clamp<std::size_t>(k, 1, sorted_.size());
  return sorted_[k - 1];
}

double Ecdf::quantile_at(std::size_t num, std::size_t den) const {
  if (num == 0 || den == 0 || num > den) {
    throw Error(ErrorCode::DomainError, "rational quantile level must lie in (0, 1]");
  }
  // k = ceil(n * num / den)
  const auto n = static_cast<std::uint64_t>(sorted_.size());
  const std::uint64_t k = (n * num + den - 1) / den;
  return sorted_[static_cast<std::size_t>(k) - 1];
}

double centered_quantile_product_integral(std::span<const double> g_sorted, double g_center,
                                          std::span<const double> f_sorted, double f_center) {
  const auto ng = static_cast<std::uint64_t>(g_sorted.size());
  const auto nf = static_cast<std::uint64_t>(f_sorted.size());
  if (ng == 0 || nf == 0) {
    throw Error(ErrorCode::EmptySample, "quantile product integral needs non-empty samples");
  }
  // Breakpoints are kept as integers on the common grid 1/(ng*nf):
  // j/ng -> j*nf and k/nf -> k*ng.
  std::uint64_t j = 1;
  std::uint64_t k = 1;
  std::uint64_t prev = 0;
  double sum = 0.0;
  while (j <= ng && k <= nf) {
    const std::uint64_t next_g = j * nf;
    const std::uint64_t next_f = k * ng;
    const std::uint64_t next = std::min(next_g, next_f);
    sum += static_cast<double>(next - prev) * (g_sorted[j - 1] - g_center) *
           (f_sorted[k - 1] - f_center);
    prev = next;
    if (next_g == next) ++j;
    if (next_f == next) ++k;
  }
  return sum / (static_cast<double>(ng) * static_cast<double>(nf));
}

double quantile_product_integral(std::span<const double> g_sorted,
                                 std::span<const double> f_sorted) {
  return centered_quantile_product_integral(g_sorted, 0.0, f_sorted, 0.0);
}

double quantile_product_integral(const Ecdf& g, const Ecdf& f) {
  return quantile_product_integral(g.sorted_values(), f.sorted_values());
}

double frechet_upper_joint(const Ecdf& g, const Ecdf& f, double y1, double y0) {
  return std::min(g(y1), f(y0));
}

}  // namespace strataboot
