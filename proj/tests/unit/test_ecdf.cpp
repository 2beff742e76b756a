#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "helpers.hpp"
#include "strataboot/ecdf.hpp"
#include "strataboot/oracle.hpp"
#include "strataboot/random.hpp"

using namespace strataboot;
using strataboot::test::error_code_of;

TEST_CASE("ecdf evaluation") {
  const Ecdf f({4, 2});
  CHECK(f(3) == 0.5);
  CHECK(f(4) == 1.0);
  CHECK(f(1.999) == 0.0);
  CHECK(f(1e300) == 1.0);
  const Ecdf ties({1, 3, 1});
  CHECK(ties(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("ecdf rejects empty and non-finite samples") {
  CHECK(error_code_of([] { Ecdf({}); }) == ErrorCode::EmptySample);
  CHECK(error_code_of([] { Ecdf({1.0, std::numeric_limits<double>::quiet_NaN()}); }) ==
        ErrorCode::NonFiniteOutcome);
  CHECK(error_code_of([] { Ecdf({std::numeric_limits<double>::infinity()}); }) ==
        ErrorCode::NonFiniteOutcome);
}

TEST_CASE("left-continuous quantile") {
  const Ecdf f({2, 4});
  CHECK(f.quantile(0.5) == 2);
  CHECK(f.quantile(0.50001) == 4);
  CHECK(f.quantile(1.0) == 4);
  CHECK(f.quantile(1e-9) == 2);
  const Ecdf point({7});
  for (double u : {0.01, 0.3, 0.99, 1.0}) CHECK(point.quantile(u) == 7);
  CHECK(error_code_of([&] { f.quantile(0.0); }) == ErrorCode::DomainError);
  CHECK(error_code_of([&] { f.quantile(1.5); }) == ErrorCode::DomainError);
  CHECK(f.quantile_at(1, 2) == 2);
  CHECK(f.quantile_at(3, 4) == 4);
}

TEST_CASE("quantile round trip reproduces the sample") {
  Rng rng(11, 0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> v(1 + rng.below(15));
    for (auto& x : v) x = static_cast<double>(rng.below(6));  // plenty of ties
    const Ecdf f(v);
    for (double x : v) CHECK(f.quantile(f(x)) <= x);
    const auto sorted = f.sorted_values();
    for (std::size_t k = 1; k <= v.size(); ++k) CHECK(f.quantile_at(k, v.size()) == sorted[k - 1]);
  }
}

TEST_CASE("quantile product integral worked values") {
  CHECK(quantile_product_integral(Ecdf({2, 4}), Ecdf({1, 3})) == doctest::Approx(7).epsilon(1e-15));
  CHECK(std::abs(quantile_product_integral(Ecdf({2, 4}), Ecdf({1, 3, 5})) - 31.0 / 3.0) <= 1e-14);
  CHECK(quantile_product_integral(Ecdf({2.5}), Ecdf({2.5})) == 6.25);
}

TEST_CASE("quantile product integral equals the lcm expansion") {
  Rng rng(12, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t ng = 1 + rng.below(9);
    const std::size_t nf = 1 + rng.below(9);
    std::vector<double> g(ng), f(nf);
    for (auto& x : g) x = rng.normal() * 3;
    for (auto& x : f) x = rng.gamma(1, 1);
    const Ecdf G(g), F(f);
    const std::size_t l = std::lcm(ng, nf);
    double sum = 0;
    for (std::size_t k = 0; k < l; ++k) {
      sum += G.sorted_values()[k / (l / ng)] * F.sorted_values()[k / (l / nf)];
    }
    const double exact = quantile_product_integral(G, F);
    CHECK(std::abs(exact - sum / static_cast<double>(l)) <= 1e-12 * std::max(1.0, std::abs(exact)));

    // Cauchy-Schwarz
    const double gg = quantile_product_integral(G, G);
    const double ff = quantile_product_integral(F, F);
    CHECK(exact <= std::sqrt(gg * ff) + 1e-12);

    const double centered = centered_quantile_product_integral(
        G.sorted_values(), 0.5, F.sorted_values(), -1.0);
    const double gm = std::accumulate(g.begin(), g.end(), 0.0) / ng;
    const double fm = std::accumulate(f.begin(), f.end(), 0.0) / nf;
    // int (Qg - a)(Qf - b) = int QgQf - b mean(g) - a mean(f) + ab
    CHECK(centered == doctest::Approx(exact + gm - 0.5 * fm - 0.5).epsilon(1e-12));
  }
}

TEST_CASE("Riemann oracle agrees with the exact integral") {
  CHECK(std::abs(riemann_integral_oracle(Ecdf({2, 4}), Ecdf({1, 3}), 1000000) - 7) <= 1e-5);
  CHECK(riemann_integral_oracle(Ecdf({3}), Ecdf({3}), 10000) == 9);
  CHECK(error_code_of([] { riemann_integral_oracle(Ecdf({1}), Ecdf({1}), 9999); }) ==
        ErrorCode::DomainError);
}

TEST_CASE("Frechet upper joint") {
  const Ecdf g({2, 4}), f({1, 3});
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(frechet_upper_joint(g, f, 3, 0) == 0);
  CHECK(frechet_upper_joint(g, f, inf, inf) == 1);
  CHECK(frechet_upper_joint(g, f, 2, 1) == 0.5);
}
