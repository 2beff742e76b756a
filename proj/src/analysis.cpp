#include "strataboot/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "strataboot/error.hpp"
#include "strataboot/imputation.hpp"

namespace strataboot {

namespace {

bool has_two_per_arm(const StratifiedDesign& design) {
  for (const auto& s : design.strata()) {
    if (s.treated < 2 || s.control() < 2) return false;
  }
  return true;
}

bool zero_scale(const ObservedExperiment& obs, double sigma2) {
  double scale = 0.0;
  for (double v : obs.y()) scale = std::max(scale, v * v);
  return sigma2 <= kDegenerateRelTol * scale;
}

}  // namespace

const char* to_string(AnalysisMethod method) {
  switch (method) {
    case AnalysisMethod::NeymanNormal: return "neyman-normal";
    case AnalysisMethod::SharpNormal: return "sharp-normal";
    case AnalysisMethod::SharpBoot: return "sharp-boot";
    case AnalysisMethod::PairNormal: return "pair-normal";
    case AnalysisMethod::PairBoot: return "pair-boot";
  }
  return "?";
}

AnalysisMethod parse_method(const std::string& name) {
  for (auto m : {AnalysisMethod::NeymanNormal, AnalysisMethod::SharpNormal, AnalysisMethod::SharpBoot,
                 AnalysisMethod::PairNormal, AnalysisMethod::PairBoot}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::InvalidInput, "unknown method '" + name + "'");
}

bool is_bootstrap(AnalysisMethod method) {
  return method == AnalysisMethod::SharpBoot || method == AnalysisMethod::PairBoot;
}

AnalysisResult analyze(const ObservedExperiment& obs, const AnalysisSettings& settings) {
  if (!(settings.alpha > 0.0 && settings.alpha < 1.0)) {
    throw Error(ErrorCode::DomainError, "alpha must lie in (0, 1)");
  }
  if (settings.delta && settings.method != AnalysisMethod::PairBoot) {
    throw Error(ErrorCode::InvalidInput, "delta applies to pair-boot only");
  }
  const auto& design = obs.design();
  AnalysisResult result;
  result.method = settings.method;
  result.seed = settings.seed;
  result.design_kind = design.kind();
  result.estimate = diff_in_means(obs);

  if (has_two_per_arm(design)) result.sigma2_neyman = neyman_variance(obs).sigma2_hat;
  if (design.kind() == DesignKind::SharpEligible) {
    const auto sharp = sharp_variance(obs);
    result.sigma2_sharp = sharp.sigma2_hat;
    result.negative_sharp = sharp.negative;
    if (sharp.negative) result.warnings.push_back("sharp variance estimate is negative; clipped to 0");
  }
  if (design.kind() == DesignKind::Paired && design.num_strata() >= 2) {
    result.sigma2_paired = paired_variance(obs).sigma2_hat;
  }

  // Method-specific estimators are called again so that an ineligible design
  // raises the estimator's own error.
  const std::size_t n = obs.size();
  const double tau_hat = result.estimate.tau_hat;
  switch (settings.method) {
    case AnalysisMethod::NeymanNormal:
      result.sigma2_used = neyman_variance(obs).sigma2_hat;
      break;
    case AnalysisMethod::SharpNormal:
    case AnalysisMethod::SharpBoot:
      result.sigma2_used = std::max(0.0, sharp_variance(obs).sigma2_hat);
      break;
    case AnalysisMethod::PairNormal:
    case AnalysisMethod::PairBoot:
      result.sigma2_used = paired_variance(obs).sigma2_hat;
      break;
  }

  if (!is_bootstrap(settings.method)) {
    result.ci = wald_ci(tau_hat, result.sigma2_used, n, settings.alpha);
    return result;
  }

  BootstrapOptions options;
  options.replicates = settings.replicates;
  options.alpha = settings.alpha;
  options.seed = settings.seed;
  options.threads = settings.threads;
  if (settings.method == AnalysisMethod::PairBoot) result.delta = settings.delta.value_or(tau_hat);

  result.zero_scale = zero_scale(obs, result.sigma2_used);
  auto run = [&] {
    return settings.method == AnalysisMethod::SharpBoot ? bootstrap_stratified(obs, options)
                                                        : bootstrap_paired(obs, options, result.delta);
  };
  if (result.zero_scale) {
    result.warnings.push_back(
        "variance estimate of the observed data is zero; the percentile-t interval has zero width");
    try {
      result.bootstrap = run();
    } catch (const DegenerateBootstrapError& e) {
      result.boot_replicates = e.replicates();
      result.boot_degenerate = e.n_degenerate();
      result.warnings.push_back(std::to_string(e.n_degenerate()) + " of " +
                                std::to_string(e.replicates()) + " bootstrap replicates are degenerate");
      result.ci = {tau_hat, tau_hat, settings.alpha, "percentile-t"};
      return result;
    }
  }

  BootstrapResult boot = result.bootstrap ? *result.bootstrap : run();
  result.boot_replicates = boot.replicates;
  result.boot_degenerate = boot.n_degenerate;
  result.ci = percentile_t_ci(tau_hat, std::sqrt(result.sigma2_used), n, boot);
  if (boot.n_degenerate > 0) {
    result.warnings.push_back(std::to_string(boot.n_degenerate) +
                              " degenerate bootstrap replicates excluded");
  }
  result.bootstrap = std::move(boot);
  return result;
}

}  // namespace strataboot
