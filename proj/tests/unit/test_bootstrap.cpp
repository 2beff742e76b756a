#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "strataboot/bootstrap.hpp"
#include "strataboot/random.hpp"
#include "strataboot/randomizer.hpp"

using namespace strataboot;
using namespace strataboot::test;

namespace {

struct Moments {
  double mean = 0;
  double var = 0;
};

Moments moments(const std::vector<double>& x) {
  Moments m;
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (double v : x) m.var += (v - m.mean) * (v - m.mean);
  m.var /= static_cast<double>(x.size() - 1);
  return m;
}

// M strata of size n, Y(1) = Y(0) + 1 + m / 10
ObservedExperiment additive_experiment(std::size_t strata, std::size_t size, std::uint64_t seed) {
  Rng rng(seed, 0);
  std::vector<PopulationUnit> units;
  std::vector<std::size_t> treated;
  for (std::size_t m = 0; m < strata; ++m) {
    for (std::size_t i = 0; i < size; ++i) {
      const double y0 = rng.gamma(1, 1);
      units.push_back({static_cast<std::int64_t>(m + 1), y0 + 1 + m / 10.0, y0});
    }
    treated.push_back(size / 2);
  }
  const FinitePopulation pop(units);
  Rng assign(seed, 1);
  return ObservedExperiment::observe(pop, draw_assignment(design_for(pop, treated), assign));
}

ObservedExperiment paired_experiment(std::size_t pairs, std::uint64_t seed) {
  Rng rng(seed, 0);
  std::vector<ObservationRow> rows;
  for (std::size_t m = 0; m < pairs; ++m) {
    rows.push_back({std::to_string(m), 1, rng.normal() + 0.5});
    rows.push_back({std::to_string(m), 0, rng.normal()});
  }
  return ObservedExperiment::from_rows(rows);
}

}  // namespace

TEST_CASE("empirical quantile") {
  std::vector<double> hundred(100);
  std::iota(hundred.begin(), hundred.end(), 1.0);
  CHECK(empirical_quantile(hundred, 0.025) == 3);
  CHECK(empirical_quantile(hundred, 0.975) == 98);
  const double five[] = {5};
  for (double p : {0.01, 0.5, 0.99}) CHECK(empirical_quantile(five, p) == 5);
  const double four[] = {1, 2, 3, 4};
  CHECK(empirical_quantile(four, 0.5) == 2);
  CHECK(error_code_of([] { empirical_quantile({}, 0.5); }) == ErrorCode::EmptySample);
  CHECK(error_code_of([&] { empirical_quantile(four, 1.0); }) == ErrorCode::DomainError);
}

TEST_CASE("percentile-t interval") {
  BootstrapResult boot;
  boot.t_stats = {2, -1, 0, 1, -2};
  boot.alpha = 0.4;
  attach_quantiles(boot);
  CHECK(boot.q_lo == -2);
  CHECK(boot.q_hi == 1);
  const auto ci = percentile_t_ci(10, 3, 9, boot);
  CHECK(ci.lower == 9);
  CHECK(ci.upper == 12);

  const double z = normal_quantile(0.975);
  boot.alpha = 0.05;
  boot.q_lo = -z;
  boot.q_hi = z;
  const auto injected = percentile_t_ci(4, std::sqrt(8.0), 4, boot);
  const auto wald = wald_ci(4, 8, 4, 0.05);
  CHECK(injected.lower == doctest::Approx(wald.lower).epsilon(1e-15));
  CHECK(injected.upper == doctest::Approx(wald.upper).epsilon(1e-15));

  boot.t_stats.assign(200, 0.0);
  attach_quantiles(boot);
  const auto collapsed = percentile_t_ci(4, 2, 4, boot);
  CHECK(collapsed.lower == 4);
  CHECK(collapsed.upper == 4);
  CHECK(error_code_of([&] { percentile_t_ci(4, -1, 4, boot); }) == ErrorCode::DomainError);
}

TEST_CASE("normal t-statistics reproduce the Wald interval") {
  BootstrapResult boot;
  Rng rng(51, 0);
  boot.t_stats.resize(100000);
  for (auto& t : boot.t_stats) t = rng.normal();
  boot.alpha = 0.05;
  attach_quantiles(boot);
  const double sigma = 3.0;
  const std::size_t n = 25;
  const auto ci = percentile_t_ci(1, sigma, n, boot);
  const auto wald = wald_ci(1, sigma * sigma, n, 0.05);
  const double tol = 0.02 * sigma / 5.0;
  CHECK(std::abs(ci.lower - wald.lower) <= tol);
  CHECK(std::abs(ci.upper - wald.upper) <= tol);
}

TEST_CASE("stratified bootstrap t-statistics are roughly standard normal") {
  const auto obs = additive_experiment(10, 20, 52);
  BootstrapOptions options;
  options.replicates = 2000;
  options.seed = 7;
  const auto boot = bootstrap_stratified(obs, options);
  CHECK(boot.replicates == 2000);
  CHECK(boot.n_degenerate + boot.t_stats.size() == boot.replicates);
  CHECK(boot.q_lo <= boot.q_hi);
  const auto m = moments(boot.t_stats);
  CHECK(std::abs(m.mean) <= 0.1);
  CHECK(std::abs(m.var - 1) <= 0.15);
}

TEST_CASE("paired bootstrap t-statistics are roughly standard normal") {
  const auto obs = paired_experiment(50, 53);
  BootstrapOptions options;
  options.replicates = 2000;
  options.seed = 8;
  const auto boot = bootstrap_paired(obs, options);
  const auto m = moments(boot.t_stats);
  CHECK(std::abs(m.mean) <= 0.1);
  CHECK(std::abs(m.var - 1) <= 0.15);
  CHECK(boot.tau_star == doctest::Approx(paired_variance(obs).tau_hat).epsilon(1e-15));

  const auto null = bootstrap_paired(obs, options, 0.0);
  CHECK(null.tau_star == 0);
  CHECK(null.t_stats.size() == 2000);
}

TEST_CASE("bootstrap is identical across thread counts and repeated runs") {
  const auto obs = additive_experiment(4, 12, 54);
  BootstrapOptions options;
  options.replicates = 300;
  options.seed = 99;
  options.threads = 1;
  const auto one = bootstrap_stratified(obs, options);
  options.threads = 4;
  const auto four = bootstrap_stratified(obs, options);
  const auto again = bootstrap_stratified(obs, options);
  CHECK(one.t_stats == four.t_stats);
  CHECK(four.t_stats == again.t_stats);
  CHECK(one.q_lo == four.q_lo);

  const auto pairs = paired_experiment(30, 55);
  options.threads = 1;
  const auto p1 = bootstrap_paired(pairs, options);
  options.threads = 3;
  CHECK(bootstrap_paired(pairs, options).t_stats == p1.t_stats);
}

TEST_CASE("bootstrap error paths") {
  BootstrapOptions options;
  options.seed = 1;
  const auto flat = observed({{"a", 1, 2}, {"a", 1, 2}, {"a", 0, 2}, {"a", 0, 2}});
  try {
    bootstrap_stratified(flat, options);
    FAIL("expected DegenerateBootstrapError");
  } catch (const DegenerateBootstrapError& e) {
    CHECK(e.code() == ErrorCode::DegenerateBootstrap);
    CHECK(e.n_degenerate() == 1000);
    CHECK(e.replicates() == 1000);
  }
  // every resampled Table 1 experiment has identical pair effects
  CHECK(error_code_of([&] { bootstrap_paired(table1(), options); }) == ErrorCode::DegenerateBootstrap);
  CHECK(error_code_of([&] { bootstrap_stratified(table1(), options); }) == ErrorCode::NotSharpEligible);
  CHECK(error_code_of([&] { bootstrap_paired(four_units(), options); }) == ErrorCode::NotPaired);
  CHECK(error_code_of([&] { bootstrap_paired(observed({{"1", 1, 8}, {"1", 0, 4}}), options); }) ==
        ErrorCode::TooFewPairs);
  options.replicates = 99;
  CHECK(error_code_of([&] { bootstrap_stratified(four_units(), options); }) == ErrorCode::DomainError);
  options.replicates = 100;
  options.alpha = 0;
  CHECK(error_code_of([&] { bootstrap_stratified(four_units(), options); }) == ErrorCode::DomainError);
}
