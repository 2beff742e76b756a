#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strataboot/experiment.hpp"

namespace strataboot {

enum class VarianceMethod { Neyman, Sharp, PairedNeyman };

const char* to_string(VarianceMethod method);

struct StratumVariance {
  double s2_treated = 0.0;
  double s2_control = 0.0;
  std::optional<double> s_upper;  // sharp covariance bound, Sharp only
};

// All variances are on the Var(sqrt(n) (tau_hat - tau)) scale.
struct VarianceReport {
  double tau_hat = 0.0;
  double sigma2_hat = 0.0;
  VarianceMethod method = VarianceMethod::Neyman;
  std::vector<StratumVariance> per_stratum;
  // Set when a sharp estimate came out negative. The co-monotone covariance
  // is never below zero, so only rounding can cause this; the value is
  // reported as computed.
  bool negative = false;
};

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double alpha = 0.05;
  std::string method_tag;

  double length() const noexcept { return upper - lower; }
  bool covers(double value) const noexcept { return lower <= value && value <= upper; }
};

// Observed outcomes split by stratum and arm. The bootstrap fills these in
// place for every replicate.
struct ArmSample {
  std::vector<double> treated;
  std::vector<double> control;

  std::size_t size() const noexcept { return treated.size() + control.size(); }
};

std::vector<ArmSample> split_by_arm(const ObservedExperiment& obs);

EstimandReport diff_in_means(const ObservedExperiment& obs);
double diff_in_means(std::span<const ArmSample> strata);

// Throws InsufficientArm if any arm has fewer than two units.
VarianceReport neyman_variance(const ObservedExperiment& obs);
VarianceReport neyman_variance(std::span<const ArmSample> strata);

// Throws NotSharpEligible unless 2 <= n_m1 <= n_m - 2 in every stratum.
VarianceReport sharp_variance(const ObservedExperiment& obs);
VarianceReport sharp_variance(std::span<const ArmSample> strata);

struct PointEstimate {
  double tau_hat = 0.0;
  double sigma2_hat = 0.0;
};

// tau_hat and the sharp estimate only, for the bootstrap inner loop. Arms must
// already be sorted ascending; eligibility is the caller's responsibility.
PointEstimate sharp_estimate_sorted(std::span<const ArmSample> strata);

// Throws NotPaired for a non-paired design and TooFewPairs when M < 2.
VarianceReport paired_variance(const ObservedExperiment& obs);
double paired_variance(std::span<const double> pair_effects);

ConfidenceInterval wald_ci(double tau_hat, double sigma2_hat, std::size_t n, double alpha,
                           std::string method_tag = "normal");

// Standard normal inverse CDF (Wichura AS241, about 1e-16 relative error).
// Throws DomainError unless 0 < p < 1.
double normal_quantile(double p);
double normal_cdf(double x);

}  // namespace strataboot
