#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "strataboot/estimators.hpp"
#include "strataboot/experiment.hpp"
#include "strataboot/imputation.hpp"

namespace strataboot {

inline constexpr std::size_t kDefaultReplicates = 1000;
inline constexpr std::size_t kMinReplicates = 100;
inline constexpr double kMaxDegenerateFraction = 0.01;
// A variance estimate at or below this multiple of the largest squared outcome
// is treated as zero.
inline constexpr double kDegenerateRelTol = 1e-20;

struct BootstrapResult {
  std::vector<double> t_stats;  // non-degenerate replicates, in replicate order
  std::size_t n_degenerate = 0;
  double q_lo = 0.0;  // empirical alpha/2 quantile of t_stats
  double q_hi = 0.0;  // empirical 1 - alpha/2 quantile
  double alpha = 0.05;
  std::size_t replicates = 0;
  double tau_star = 0.0;
};

struct BootstrapOptions {
  std::size_t replicates = kDefaultReplicates;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0 = default_thread_count()
};

// Causal bootstrap with rank-preserving imputation. Replicate b redraws the
// stratified assignment from stream (seed, b), re-observes the imputed table
// and records T* = sqrt(n) (tau_hat* - tau*) / sigma_hat*_S. Replicates whose
// sharp estimate is not positive are excluded and counted.
// Throws NotSharpEligible, DomainError (B < 100 or alpha outside (0, 1)) and
// DegenerateBootstrapError when more than 1% of replicates are degenerate.
BootstrapResult bootstrap_stratified(const ObservedExperiment& obs, const BootstrapOptions& options);

// Same for paired experiments with constant-effect imputation at delta
// (default tau_hat) and the paired variance estimator; tau* = delta.
// Throws NotPaired, TooFewPairs, DomainError and DegenerateBootstrapError.
BootstrapResult bootstrap_paired(const ObservedExperiment& obs, const BootstrapOptions& options,
                                 std::optional<double> delta = std::nullopt);

// Runs the replicate loop over an already imputed population. Exposed for
// callers that impute once and resample many times.
BootstrapResult bootstrap_sharp_from(const ObservedExperiment& obs, const ImputedPopulation& imputed,
                                     const BootstrapOptions& options);
BootstrapResult bootstrap_paired_from(const ObservedExperiment& obs, const ImputedPopulation& imputed,
                                      const BootstrapOptions& options);

// Type-1 empirical quantile: the ceil(K p)-th order statistic of K sorted
// values. Throws EmptySample and DomainError unless 0 < p < 1.
double empirical_quantile(std::span<const double> sorted_stats, double p);

// Fills q_lo/q_hi of `result` from its t_stats.
void attach_quantiles(BootstrapResult& result);

// (tau_hat - sigma_hat q_hi / sqrt(n), tau_hat - sigma_hat q_lo / sqrt(n)).
// sigma_hat is the studentizing scale computed on the original data.
ConfidenceInterval percentile_t_ci(double tau_hat, double sigma_hat, std::size_t n,
                                   const BootstrapResult& boot);

}  // namespace strataboot
