#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "strataboot/bootstrap.hpp"
#include "strataboot/estimators.hpp"
#include "strataboot/experiment.hpp"

namespace strataboot {

enum class AnalysisMethod { NeymanNormal, SharpNormal, SharpBoot, PairNormal, PairBoot };

const char* to_string(AnalysisMethod method);
// Throws InvalidInput on an unknown name.
AnalysisMethod parse_method(const std::string& name);
bool is_bootstrap(AnalysisMethod method);

struct AnalysisSettings {
  AnalysisMethod method = AnalysisMethod::NeymanNormal;
  double alpha = 0.05;
  std::size_t replicates = kDefaultReplicates;
  std::optional<double> delta;  // pair-boot only
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

struct AnalysisResult {
  AnalysisMethod method = AnalysisMethod::NeymanNormal;
  EstimandReport estimate;
  DesignKind design_kind = DesignKind::Other;
  // Every variance estimator the design supports, independent of the method.
  std::optional<double> sigma2_neyman;
  std::optional<double> sigma2_sharp;
  std::optional<double> sigma2_paired;
  double sigma2_used = 0.0;
  ConfidenceInterval ci;
  std::optional<BootstrapResult> bootstrap;
  std::optional<double> delta;
  std::uint64_t seed = 0;
  bool negative_sharp = false;
  // Set when the studentizing scale of the original data is zero. The
  // percentile-t interval then has zero width whatever the quantiles are, so a
  // bootstrap that fails as degenerate still yields the interval (tau_hat, tau_hat).
  bool zero_scale = false;
  std::size_t boot_replicates = 0;
  std::size_t boot_degenerate = 0;
  std::vector<std::string> warnings;
};

// Runs the requested method. Throws NotSharpEligible, NotPaired, TooFewPairs,
// InsufficientArm, DomainError and DegenerateBootstrapError.
AnalysisResult analyze(const ObservedExperiment& obs, const AnalysisSettings& settings);

}  // namespace strataboot
