#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "helpers.hpp"
#include "strataboot/random.hpp"
#include "strataboot/randomizer.hpp"

using namespace strataboot;
using namespace strataboot::test;

namespace {

unsigned pattern(std::span<const std::uint8_t> z) {
  unsigned code = 0;
  for (auto b : z) code = code * 2 + b;
  return code;
}

}  // namespace

TEST_CASE("drawn assignments respect stratum counts") {
  const auto design = StratifiedDesign::from_counts({{2, 1}, {5, 2}, {9, 4}, {3, 2}});
  Rng rng(31, 0);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto z = draw_assignment(design, rng);
    REQUIRE(z.size() == design.num_units());
    for (std::size_t m = 0; m < design.num_strata(); ++m) {
      std::size_t treated = 0;
      for (std::size_t i : design.members(m)) treated += z[i];
      CHECK(treated == design.stratum(m).treated);
    }
  }
}

TEST_CASE("paired randomization is fair") {
  const auto design = StratifiedDesign::from_counts({{2, 1}});
  Rng rng(32, 0);
  int first = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) first += draw_assignment(design, rng)[0];
  CHECK(std::abs(first - draws / 2) < 5 * std::sqrt(draws * 0.25));
}

TEST_CASE("chi-square uniformity over C(4,2) patterns") {
  const auto design = StratifiedDesign::from_counts({{4, 2}});
  Rng rng(33, 0);
  std::map<unsigned, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++counts[pattern(draw_assignment(design, rng))];
  REQUIRE(counts.size() == 6);
  double chi2 = 0;
  const double expected = draws / 6.0;
  for (const auto& [p, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 20.515);  // chi-square(5) upper 0.001 point
}

TEST_CASE("pattern frequencies within five sigma") {
  const auto design = StratifiedDesign::from_counts({{4, 2}, {4, 2}});
  Rng rng(34, 0);
  std::map<unsigned, int> counts;
  const int draws = 100000;
  std::vector<std::size_t> scratch;
  AssignmentVector z(design.num_units());
  for (int i = 0; i < draws; ++i) {
    draw_assignment(design, rng, z, scratch);
    ++counts[pattern(z)];
  }
  REQUIRE(counts.size() == 36);
  const double p = 1.0 / 36.0;
  const double sd = std::sqrt(draws * p * (1 - p));
  for (const auto& [pat, c] : counts) CHECK(std::abs(c - draws * p) < 5 * sd);
}

TEST_CASE("streams are reproducible and distinct") {
  const auto design = StratifiedDesign::from_counts({{20, 10}, {20, 7}});
  const auto a = draw_assignment(design, RngState{99, 5});
  const auto b = draw_assignment(design, RngState{99, 5});
  CHECK(a == b);
  Rng rng(99, 5);
  CHECK(draw_assignment(design, rng) == a);
  std::set<AssignmentVector> distinct;
  for (std::uint64_t s = 0; s < 20; ++s) distinct.insert(draw_assignment(design, RngState{99, s}));
  CHECK(distinct.size() == 20);
}

TEST_CASE("enumeration visits every assignment once") {
  auto count = [](const StratifiedDesign& d) {
    std::set<unsigned> seen;
    std::size_t visits = 0;
    for_each_assignment(d, [&](std::span<const std::uint8_t> z) {
      ++visits;
      seen.insert(pattern(z));
    });
    CHECK(seen.size() == visits);
    return visits;
  };
  CHECK(count(StratifiedDesign::from_counts({{2, 1}, {2, 1}})) == 4);
  CHECK(count(StratifiedDesign::from_counts({{4, 2}})) == 6);
  CHECK(count(StratifiedDesign::from_counts({{5, 2}, {3, 1}, {4, 3}})) == 10 * 3 * 4);
  CHECK(count_assignments(StratifiedDesign::from_counts({{5, 2}, {3, 1}})) == 30);

  const auto big = StratifiedDesign::from_counts({{30, 15}});
  CHECK(count_assignments(big) == doctest::Approx(155117520.0));
  CHECK(error_code_of([&] { AssignmentEnumerator e(big); }) == ErrorCode::TooLargeToEnumerate);
}

TEST_CASE("Rng samplers") {
  Rng rng(35, 0);
  double sum = 0, sum2 = 0, gsum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
    gsum += rng.gamma(0.1, 10.0);
    const double u = rng.uniform();
    CHECK_UNARY(u >= 0.0 && u < 1.0);
    CHECK(rng.below(7) < 7);
    CHECK(rng.pareto(1.0, 1.0) >= 1.0);
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum2 / n - 1) < 0.02);
  CHECK(std::abs(gsum / n - 1) < 0.05);  // Gamma(0.1, 10) has mean 1, sd ~3.2
}

TEST_CASE("derived seeds differ by salt") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}
