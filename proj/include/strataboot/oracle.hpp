#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "strataboot/ecdf.hpp"
#include "strataboot/experiment.hpp"

namespace strataboot {

// Brute-force references. Nothing in here calls the estimators or the
// merged-breakpoint integral, so they can be used to check them.

struct DistributionPoint {
  double tau_hat = 0.0;
  double prob = 0.0;
};

// Exact randomization distribution of tau_hat, ascending in tau_hat, with
// values equal up to 1e-12 (relative) merged. Throws TooLargeToEnumerate.
std::vector<DistributionPoint> exact_distribution(const FinitePopulation& pop,
                                                  const StratifiedDesign& design);

struct ExactMoments {
  double mean_tau_hat = 0.0;
  double variance = 0.0;  // n Var(tau_hat), i.e. Var(sqrt(n) tau_hat)
  double assignments = 0.0;
};

// Streaming mean and variance over every admissible assignment.
ExactMoments exact_moments(const FinitePopulation& pop, const StratifiedDesign& design);

struct IdentityReport {
  bool passed = true;
  double tau = 0.0;
  double mean_tau_hat = 0.0;
  double exact_variance = 0.0;
  double sigma2 = 0.0;        // stratum-variance decomposition
  double sigma2_cov = 0.0;    // covariance decomposition
  double sigma2_sharp = 0.0;
  bool comonotonic = false;   // (y1, y0) co-monotonic in every stratum
  std::vector<std::string> failures;
};

// Enumerates the design and checks unbiasedness, both variance
// decompositions against the exact variance, sigma2 <= sigma2_S, and equality
// under within-stratum co-monotonicity. Each stratum is also enumerated on its
// own so that a failure names the stratum. Returns the report; never throws on
// a failed identity.
IdentityReport check_variance_identities(const FinitePopulation& pop, const StratifiedDesign& design,
                                         double tolerance = 1e-12);

// As above but throws IdentityViolation listing the failures.
IdentityReport verify_variance_identities(const FinitePopulation& pop, const StratifiedDesign& design,
                                          double tolerance = 1e-12);

bool is_comonotonic(std::span<const double> y1, std::span<const double> y0);

// Midpoint rule for integral_0^1 Qg(u) Qf(u) du on `grid` cells (grid >= 1e4).
double riemann_integral_oracle(const Ecdf& g, const Ecdf& f, std::size_t grid);

enum class Arm { Treated, Control };

// Tail bound for sup_y sum_m pi_m (Ghat_m(y) - G_m(y)) >= epsilon under
// stratified complete randomization:
//   n exp[-n eps^2 / 4 / sum_m pi_m n_m0 n_m / (n_m1 (n_m + 2))]
// (arm counts swapped for the control arm). Throws DomainError unless eps > 0.
double concentration_bound(const StratifiedDesign& design, double epsilon, Arm arm = Arm::Treated);

// One-sided sup deviation sup_y sum_m pi_m (Ghat_m(y) - G_m(y)) for the arm
// selected by z, evaluated exactly over the jump points of the step functions.
class SupDeviation {
 public:
  SupDeviation(const StratifiedDesign& design, std::span<const double> values, Arm arm);
  double operator()(std::span<const std::uint8_t> z) const;

 private:
  std::vector<std::size_t> order_;      // units by ascending value
  std::vector<std::size_t> group_end_;  // exclusive ends of tied runs in order_
  std::vector<double> in_arm_weight_;   // pi_m / n_m,arm
  std::vector<double> base_weight_;     // -pi_m / n_m
  Arm arm_;
};

struct TailCheck {
  double epsilon = 0.0;
  double bound = 0.0;
  std::size_t draws = 0;
  std::size_t exceedances = 0;
  double tail = 0.0;
  double wilson_upper = 0.0;  // 95% Wilson upper limit of the tail probability
  bool informative = false;   // bound <= 1
  bool passed = true;         // !informative || tail <= bound
};

// Monte Carlo estimate of the tail probability for each epsilon.
std::vector<TailCheck> concentration_tail_check(const StratifiedDesign& design,
                                                std::span<const double> values,
                                                std::span<const double> epsilons, std::size_t draws,
                                                std::uint64_t seed, Arm arm = Arm::Treated);

double wilson_upper(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

}  // namespace strataboot
