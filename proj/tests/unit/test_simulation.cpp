#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "strataboot/oracle.hpp"
#include "strataboot/simulation.hpp"

using namespace strataboot;
using namespace strataboot::test;

namespace {

DgpSpec stratified(CaseKind kind, std::size_t strata, std::size_t size) {
  DgpSpec spec;
  spec.kind = kind;
  spec.strata = strata;
  spec.stratum_size = size;
  spec.population_seed = 3;
  return spec;
}

}  // namespace

TEST_CASE("case couplings") {
  const auto c1 = generate_population(stratified(CaseKind::StratifiedAdditive, 3, 6));
  const auto d1 = spec_design(stratified(CaseKind::StratifiedAdditive, 3, 6));
  CHECK(c1.size() == 18);
  for (std::size_t i = 0; i < c1.size(); ++i) CHECK(c1.y1()[i] == c1.y0()[i]);
  const auto t1 = population_truth(c1, d1);
  CHECK(t1.sigma2 == doctest::Approx(t1.sigma2_sharp).epsilon(1e-12));

  const auto spec2 = stratified(CaseKind::StratifiedComonotonic, 3, 6);
  const auto c2 = generate_population(spec2);
  const auto d2 = spec_design(spec2);
  for (std::size_t m = 0; m < d2.num_strata(); ++m) {
    std::vector<double> y1, y0;
    for (std::size_t i : d2.members(m)) {
      y1.push_back(c2.y1()[i]);
      y0.push_back(c2.y0()[i]);
    }
    CHECK(std::is_sorted(y1.begin(), y1.end()));
    CHECK(std::is_sorted(y0.begin(), y0.end()));
    CHECK(is_comonotonic(y1, y0));
  }

  const auto c4 = generate_population(stratified(CaseKind::StratifiedIndependent, 10, 40));
  const auto t4 = population_truth(c4, spec_design(stratified(CaseKind::StratifiedIndependent, 10, 40)));
  CHECK(t4.sigma2 < t4.sigma2_sharp);

  const auto c3 = generate_population(stratified(CaseKind::StratifiedDependent, 2, 200));
  double mean = 0, sq = 0;
  for (std::size_t i = 0; i < c3.size(); ++i) {
    const double e = c3.y0()[i] - c3.y1()[i];
    mean += e;
    sq += e * e;
  }
  mean /= 400;
  CHECK(std::abs(mean) < 0.1);
  CHECK(std::sqrt(sq / 400 - mean * mean) == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("populations are reproducible from their seed") {
  auto spec = stratified(CaseKind::StratifiedIndependent, 4, 10);
  const auto a = generate_population(spec);
  const auto b = generate_population(spec);
  CHECK(std::equal(a.y1().begin(), a.y1().end(), b.y1().begin()));
  CHECK(std::equal(a.y0().begin(), a.y0().end(), b.y0().begin()));
  spec.population_seed = 4;
  const auto c = generate_population(spec);
  CHECK_FALSE(std::equal(a.y1().begin(), a.y1().end(), c.y1().begin()));
}

TEST_CASE("designs from specs") {
  auto spec = stratified(CaseKind::StratifiedAdditive, 5, 10);
  spec.propensity = Propensity::Unequal;
  const auto d = spec_design(spec);
  CHECK(d.stratum(0).treated == 4);
  CHECK(d.stratum(2).treated == 4);  // first ceil(5 / 2) = 3 strata
  CHECK(d.stratum(3).treated == 6);
  CHECK(d.stratum(4).treated == 6);

  DgpSpec paired;
  paired.kind = CaseKind::PairedIndependent;
  paired.strata = 12;
  const auto dp = spec_design(paired);
  CHECK(dp.kind() == DesignKind::Paired);
  CHECK(dp.num_units() == 24);
  CHECK(is_paired(paired.kind));
  CHECK_FALSE(is_paired(CaseKind::StratifiedAdditive));
  CHECK(std::string(to_string(CaseKind::StratifiedComonotonic)) == "stratified-2");
  CHECK(std::string(to_string(CaseKind::PairedIndependent)) == "paired-2");
}

TEST_CASE("invalid specs") {
  auto spec = stratified(CaseKind::StratifiedAdditive, 0, 10);
  CHECK(error_code_of([&] { validate_spec(spec); }) == ErrorCode::InvalidInput);
  spec.strata = 2;
  spec.distribution = {Distribution::Kind::Pareto, 1.0, 0.0};
  CHECK(error_code_of([&] { validate_spec(spec); }) == ErrorCode::DomainError);
  spec.distribution = {Distribution::Kind::Gamma, -1.0, 1.0};
  CHECK(error_code_of([&] { validate_spec(spec); }) == ErrorCode::DomainError);
  DgpSpec one_pair;
  one_pair.kind = CaseKind::PairedAdditive;
  one_pair.strata = 1;
  CHECK(error_code_of([&] { validate_spec(one_pair); }) == ErrorCode::TooFewPairs);
}

TEST_CASE("distribution labels") {
  CHECK(Distribution{Distribution::Kind::Gamma, 0.1, 10}.label() == "gamma(0.1;10)");
  CHECK(Distribution{Distribution::Kind::Pareto, 1, 1}.label() == "pareto(1;1)");
}

TEST_CASE("studies are deterministic across thread counts") {
  const auto spec = stratified(CaseKind::StratifiedComonotonic, 3, 8);
  StudyOptions options;
  options.replications = 100;
  options.replicates = 100;
  options.seed = 5;
  options.threads = 1;
  const auto a = run_study(spec, options);
  options.threads = 4;
  const auto b = run_study(spec, options);
  REQUIRE(a.methods.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(a.methods[k].method == b.methods[k].method);
    CHECK(a.methods[k].covered == b.methods[k].covered);
    CHECK(a.methods[k].mean_length == b.methods[k].mean_length);
  }
  CHECK(a.ratio == b.ratio);
  CHECK(a.methods[0].method == "neyman-normal");
  CHECK(a.methods[2].method == "sharp-boot");
  for (const auto& m : a.methods) {
    CHECK(m.coverage >= 0);
    CHECK(m.coverage <= 1);
    CHECK(m.mean_length >= 0);
  }

  DgpSpec paired;
  paired.kind = CaseKind::PairedAdditive;
  paired.strata = 20;
  const auto p = run_study(paired, options);
  REQUIRE(p.methods.size() == 2);
  CHECK(p.methods[0].method == "pair-normal");
  CHECK(p.methods[1].method == "pair-boot");
  CHECK(std::isnan(p.ratio));

  options.replicates = 0;
  CHECK(run_study(spec, options).methods.size() == 2);
  options.replications = 99;
  CHECK(error_code_of([&] { run_study(spec, options); }) == ErrorCode::DomainError);
  options.replications = 100;
  CHECK(error_code_of([&] { run_paired_study(spec, options); }) == ErrorCode::NotPaired);
}
