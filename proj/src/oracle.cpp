#include "strataboot/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "strataboot/error.hpp"
#include "strataboot/random.hpp"
#include "strataboot/randomizer.hpp"

namespace strataboot {

namespace {

// tau_hat for one assignment, by direct summation over units.
double tau_hat_for(const FinitePopulation& pop, const StratifiedDesign& design,
                   std::span<const std::uint8_t> z) {
  const double n = static_cast<double>(pop.size());
  double tau = 0.0;
  for (std::size_t m = 0; m < design.num_strata(); ++m) {
    double treated = 0.0;
    double control = 0.0;
    for (std::size_t i : design.members(m)) {
      if (z[i]) {
        treated += pop.y1()[i];
      } else {
        control += pop.y0()[i];
      }
    }
    const auto& s = design.stratum(m);
    tau += static_cast<double>(s.size) / n *
           (treated / static_cast<double>(s.treated) - control / static_cast<double>(s.control()));
  }
  return tau;
}

void require_match(const FinitePopulation& pop, const StratifiedDesign& design) {
  if (pop.size() != design.num_units() || pop.num_strata() != design.num_strata()) {
    throw Error(ErrorCode::InvalidInput, "design does not match the population");
  }
}

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::vector<DistributionPoint> exact_distribution(const FinitePopulation& pop,
                                                  const StratifiedDesign& design) {
  require_match(pop, design);
  std::vector<double> values;
  AssignmentEnumerator it(design);
  while (it.next()) values.push_back(tau_hat_for(pop, design, it.current()));
  std::sort(values.begin(), values.end());
  const double p = 1.0 / static_cast<double>(values.size());
  std::vector<DistributionPoint> out;
  std::size_t count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ++count;
    const bool last = i + 1 == values.size() || !close(values[i + 1], values[i], 1e-12);
    if (last) {
      out.push_back({values[i], static_cast<double>(count) * p});
      count = 0;
    }
  }
  return out;
}

ExactMoments exact_moments(const FinitePopulation& pop, const StratifiedDesign& design) {
  require_match(pop, design);
  // Welford accumulation keeps the variance accurate for 1e7 terms.
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
  AssignmentEnumerator it(design);
  while (it.next()) {
    const double t = tau_hat_for(pop, design, it.current());
    count += 1.0;
    const double delta = t - mean;
    mean += delta / count;
    m2 += delta * (t - mean);
  }
  return {mean, static_cast<double>(pop.size()) * m2 / count, count};
}

bool is_comonotonic(std::span<const double> y1, std::span<const double> y0) {
  for (std::size_t i = 0; i < y1.size(); ++i) {
    for (std::size_t j = i + 1; j < y1.size(); ++j) {
      if ((y1[i] - y1[j]) * (y0[i] - y0[j]) < 0.0) return false;
    }
  }
  return true;
}

IdentityReport check_variance_identities(const FinitePopulation& pop, const StratifiedDesign& design,
                                         double tolerance) {
  require_match(pop, design);
  IdentityReport report;
  const auto truth = population_truth(pop, design);
  const auto exact = exact_moments(pop, design);
  report.tau = truth.tau;
  report.mean_tau_hat = exact.mean_tau_hat;
  report.exact_variance = exact.variance;
  report.sigma2 = truth.sigma2;
  report.sigma2_cov = truth.sigma2_cov;
  report.sigma2_sharp = truth.sigma2_sharp;

  auto fail = [&](const std::string& what) {
    report.passed = false;
    report.failures.push_back(what);
  };
  if (!close(exact.mean_tau_hat, truth.tau, tolerance)) fail("E[tau_hat] != tau");
  if (!close(exact.variance, truth.sigma2, tolerance)) fail("exact variance != stratum-variance form");
  if (!close(exact.variance, truth.sigma2_cov, tolerance)) fail("exact variance != covariance form");
  if (truth.sigma2 > truth.sigma2_sharp + tolerance * std::max(1.0, std::abs(truth.sigma2_sharp))) {
    fail("sigma2 exceeds the sharp bound");
  }

  // Per-stratum enumeration localizes a failure.
  report.comonotonic = true;
  for (std::size_t m = 0; m < design.num_strata(); ++m) {
    std::vector<PopulationUnit> units;
    std::vector<double> y1;
    std::vector<double> y0;
    for (std::size_t i : design.members(m)) {
      units.push_back({0, pop.y1()[i], pop.y0()[i]});
      y1.push_back(pop.y1()[i]);
      y0.push_back(pop.y0()[i]);
    }
    const bool comonotonic = is_comonotonic(y1, y0);
    report.comonotonic = report.comonotonic && comonotonic;
    const FinitePopulation sub(units);
    const auto sub_design = StratifiedDesign::from_counts({design.stratum(m)});
    const auto sub_truth = population_truth(sub, sub_design);
    const auto sub_exact = exact_moments(sub, sub_design);
    const std::string where = "stratum " + std::to_string(m + 1) + ": ";
    if (!close(sub_exact.mean_tau_hat, sub_truth.tau, tolerance)) fail(where + "biased tau_hat");
    if (!close(sub_exact.variance, sub_truth.sigma2, tolerance)) fail(where + "variance mismatch");
    if (sub_truth.sigma2 > sub_truth.sigma2_sharp + tolerance * std::max(1.0, sub_truth.sigma2_sharp)) {
      fail(where + "sharp bound violated");
    }
    if (comonotonic && !close(sub_truth.sigma2, sub_truth.sigma2_sharp, tolerance)) {
      fail(where + "co-monotonic stratum but sigma2 != sigma2_S");
    }
  }
  if (report.comonotonic && !close(truth.sigma2, truth.sigma2_sharp, tolerance)) {
    fail("co-monotonic population but sigma2 != sigma2_S");
  }
  return report;
}

IdentityReport verify_variance_identities(const FinitePopulation& pop, const StratifiedDesign& design,
                                          double tolerance) {
  auto report = check_variance_identities(pop, design, tolerance);
  if (!report.passed) {
    std::ostringstream msg;
    for (std::size_t i = 0; i < report.failures.size(); ++i) {
      msg << (i ? "; " : "") << report.failures[i];
    }
    throw Error(ErrorCode::IdentityViolation, msg.str());
  }
  return report;
}

double riemann_integral_oracle(const Ecdf& g, const Ecdf& f, std::size_t grid) {
  if (grid < 10000) {
    throw Error(ErrorCode::DomainError, "the Riemann oracle needs at least 1e4 grid cells");
  }
  const double h = 1.0 / static_cast<double>(grid);
  double sum = 0.0;
  for (std::size_t k = 0; k < grid; ++k) {
    const double u = (static_cast<double>(k) + 0.5) * h;
    sum += g.quantile(u) * f.quantile(u);
  }
  return sum * h;
}

double concentration_bound(const StratifiedDesign& design, double epsilon, Arm arm) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::DomainError, "epsilon must be positive");
  }
  const double n = static_cast<double>(design.num_units());
  double weight = 0.0;
  for (std::size_t m = 0; m < design.num_strata(); ++m) {
    const auto& s = design.stratum(m);
    const double nm = static_cast<double>(s.size);
    const double in_arm = static_cast<double>(arm == Arm::Treated ? s.treated : s.control());
    const double out_arm = nm - in_arm;
    weight += design.weight(m) * out_arm * nm / (in_arm * (nm + 2.0));
  }
  return n * std::exp(-n * epsilon * epsilon / 4.0 / weight);
}

SupDeviation::SupDeviation(const StratifiedDesign& design, std::span<const double> values, Arm arm)
    : order_(design.num_units()),
      in_arm_weight_(design.num_units()),
      base_weight_(design.num_units()),
      arm_(arm) {
  if (values.size() != design.num_units()) {
    throw Error(ErrorCode::InvalidInput, "one value per unit is required");
  }
  for (std::size_t i = 0; i < design.num_units(); ++i) {
    const std::size_t m = design.unit_stratum()[i];
    const auto& s = design.stratum(m);
    const double pi = design.weight(m);
    const double arm_size = static_cast<double>(arm == Arm::Treated ? s.treated : s.control());
    in_arm_weight_[i] = pi / arm_size;
    base_weight_[i] = -pi / static_cast<double>(s.size);
  }
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  for (std::size_t k = 0; k < order_.size(); ++k) {
    if (k + 1 == order_.size() || values[order_[k + 1]] != values[order_[k]]) {
      group_end_.push_back(k + 1);
    }
  }
}

double SupDeviation::operator()(std::span<const std::uint8_t> z) const {
  // The deviation is a step function jumping only at the unit values; left of
  // the smallest value it is zero.
  double best = 0.0;
  double running = 0.0;
  std::size_t k = 0;
  for (std::size_t end : group_end_) {
    for (; k < end; ++k) {
      const std::size_t i = order_[k];
      const bool in_arm = arm_ == Arm::Treated ? z[i] != 0 : z[i] == 0;
      running += base_weight_[i] + (in_arm ? in_arm_weight_[i] : 0.0);
    }
    best = std::max(best, running);
  }
  return best;
}

double wilson_upper(std::size_t successes, std::size_t trials, double z) {
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = p + z2 / (2.0 * n);
  const double spread = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return std::min(1.0, (centre + spread) / (1.0 + z2 / n));
}

std::vector<TailCheck> concentration_tail_check(const StratifiedDesign& design,
                                                std::span<const double> values,
                                                std::span<const double> epsilons, std::size_t draws,
                                                std::uint64_t seed, Arm arm) {
  const SupDeviation deviation(design, values, arm);
  std::vector<double> sups(draws);
  std::vector<std::uint8_t> z(design.num_units());
  std::vector<std::size_t> scratch;
  for (std::size_t d = 0; d < draws; ++d) {
    Rng rng(seed, d);
    draw_assignment(design, rng, z, scratch);
    sups[d] = deviation(z);
  }
  std::vector<TailCheck> out;
  for (double eps : epsilons) {
    TailCheck check;
    check.epsilon = eps;
    check.bound = concentration_bound(design, eps, arm);
    check.draws = draws;
    // Tiny slack so a deviation that equals eps up to rounding counts as reaching it.
    check.exceedances = static_cast<std::size_t>(
        std::count_if(sups.begin(), sups.end(), [&](double s) { return s >= eps - 1e-12; }));
    check.tail = static_cast<double>(check.exceedances) / static_cast<double>(draws);
    check.wilson_upper = wilson_upper(check.exceedances, draws);
    check.informative = check.bound <= 1.0;
    check.passed = !check.informative || check.tail <= check.bound;
    out.push_back(check);
  }
  return out;
}

}  // namespace strataboot
