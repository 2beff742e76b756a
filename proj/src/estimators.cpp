#include "strataboot/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "moments.hpp"
#include "strataboot/ecdf.hpp"
#include "strataboot/error.hpp"

namespace strataboot {

const char* to_string(VarianceMethod method) {
  switch (method) {
    case VarianceMethod::Neyman: return "neyman";
    case VarianceMethod::Sharp: return "sharp";
    case VarianceMethod::PairedNeyman: return "paired";
  }
  return "unknown";
}

std::vector<ArmSample> split_by_arm(const ObservedExperiment& obs) {
  const auto& design = obs.design();
  std::vector<ArmSample> out(design.num_strata());
  for (std::size_t m = 0; m < design.num_strata(); ++m) {
    out[m].treated.reserve(design.stratum(m).treated);
    out[m].control.reserve(design.stratum(m).control());
  }
  const auto unit_stratum = design.unit_stratum();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    auto& arms = out[unit_stratum[i]];
    (obs.z()[i] ? arms.treated : arms.control).push_back(obs.y()[i]);
  }
  return out;
}

namespace {

std::size_t total_units(std::span<const ArmSample> strata) {
  std::size_t n = 0;
  for (const auto& s : strata) n += s.size();
  return n;
}

void require_arms(std::span<const ArmSample> strata) {
  for (std::size_t m = 0; m < strata.size(); ++m) {
    if (strata[m].treated.empty() || strata[m].control.empty()) {
      throw Error(ErrorCode::EmptyStratumArm,
                  "stratum " + std::to_string(m + 1) + " lacks a treated or control unit");
    }
  }
}

double stratum_effect(const ArmSample& s) {
  return detail::mean(s.treated) - detail::mean(s.control);
}

}  // namespace

double diff_in_means(std::span<const ArmSample> strata) {
  require_arms(strata);
  const double n = static_cast<double>(total_units(strata));
  double tau = 0.0;
  for (const auto& s : strata) tau += static_cast<double>(s.size()) / n * stratum_effect(s);
  return tau;
}

EstimandReport diff_in_means(const ObservedExperiment& obs) {
  const auto strata = split_by_arm(obs);
  require_arms(strata);
  EstimandReport report;
  const double n = static_cast<double>(obs.size());
  for (const auto& s : strata) {
    const double effect = stratum_effect(s);
    const double weight = static_cast<double>(s.size()) / n;
    report.tau_hat_stratum.push_back(effect);
    report.weights.push_back(weight);
    report.tau_hat += weight * effect;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Neyman-type estimator

VarianceReport neyman_variance(std::span<const ArmSample> strata) {
  for (std::size_t m = 0; m < strata.size(); ++m) {
    if (strata[m].treated.size() < 2 || strata[m].control.size() < 2) {
      throw Error(ErrorCode::InsufficientArm,
                  "stratum " + std::to_string(m + 1) +
                      " has an arm with fewer than two units; arm variances are undefined");
    }
  }
  const double n = static_cast<double>(total_units(strata));
  VarianceReport report;
  report.method = VarianceMethod::Neyman;
  for (const auto& s : strata) {
    const double n1 = static_cast<double>(s.treated.size());
    const double n0 = static_cast<double>(s.control.size());
    const double pi = static_cast<double>(s.size()) / n;
    const double m1 = detail::mean(s.treated);
    const double m0 = detail::mean(s.control);
    const double s1 = detail::sample_variance(s.treated, m1);
    const double s0 = detail::sample_variance(s.control, m0);
    report.tau_hat += pi * (m1 - m0);
    report.sigma2_hat += n * pi * pi * (s1 / n1 + s0 / n0);
    report.per_stratum.push_back({s1, s0, std::nullopt});
  }
  return report;
}

VarianceReport neyman_variance(const ObservedExperiment& obs) {
  return neyman_variance(split_by_arm(obs));
}

// ---------------------------------------------------------------------------
// Sharp estimator

namespace {

void require_sharp_eligible(std::span<const ArmSample> strata) {
  for (std::size_t m = 0; m < strata.size(); ++m) {
    if (strata[m].treated.size() < 2 || strata[m].control.size() < 2) {
      throw Error(ErrorCode::NotSharpEligible,
                  "stratum " + std::to_string(m + 1) +
                      " violates 2 <= n_m1 <= n_m - 2 required by the sharp estimator");
    }
  }
}

struct SharpTerms {
  double effect;
  double contribution;  // n0/n1 S1 + n1/n0 S0 + 2 sU
  StratumVariance variance;
};

SharpTerms sharp_terms(std::span<const double> treated_sorted, std::span<const double> control_sorted) {
  const double n1 = static_cast<double>(treated_sorted.size());
  const double n0 = static_cast<double>(control_sorted.size());
  const double nm = n1 + n0;
  const double m1 = detail::mean(treated_sorted);
  const double m0 = detail::mean(control_sorted);
  const double s1 = detail::sample_variance(treated_sorted, m1);
  const double s0 = detail::sample_variance(control_sorted, m0);
  // integral of G^-1 F^-1 minus the product of means, evaluated on centered values
  const double s_upper =
      nm / (nm - 1.0) * centered_quantile_product_integral(treated_sorted, m1, control_sorted, m0);
  return {m1 - m0, n0 / n1 * s1 + n1 / n0 * s0 + 2.0 * s_upper, {s1, s0, s_upper}};
}

}  // namespace

PointEstimate sharp_estimate_sorted(std::span<const ArmSample> strata) {
  const double n = static_cast<double>(total_units(strata));
  PointEstimate out;
  for (const auto& s : strata) {
    const auto terms = sharp_terms(s.treated, s.control);
    const double pi = static_cast<double>(s.size()) / n;
    out.tau_hat += pi * terms.effect;
    out.sigma2_hat += pi * terms.contribution;
  }
  return out;
}

VarianceReport sharp_variance(std::span<const ArmSample> strata) {
  require_sharp_eligible(strata);
  const double n = static_cast<double>(total_units(strata));
  VarianceReport report;
  report.method = VarianceMethod::Sharp;
  std::vector<double> treated;
  std::vector<double> control;
  for (const auto& s : strata) {
    treated.assign(s.treated.begin(), s.treated.end());
    control.assign(s.control.begin(), s.control.end());
    std::sort(treated.begin(), treated.end());
    std::sort(control.begin(), control.end());
    const auto terms = sharp_terms(treated, control);
    const double pi = static_cast<double>(s.size()) / n;
    report.tau_hat += pi * terms.effect;
    report.sigma2_hat += pi * terms.contribution;
    report.per_stratum.push_back(terms.variance);
  }
  report.negative = report.sigma2_hat < 0.0;
  return report;
}

VarianceReport sharp_variance(const ObservedExperiment& obs) {
  return sharp_variance(split_by_arm(obs));
}

// ---------------------------------------------------------------------------
// Paired estimator

double paired_variance(std::span<const double> pair_effects) {
  const std::size_t pairs = pair_effects.size();
  if (pairs < 2) {
    throw Error(ErrorCode::TooFewPairs, "the paired variance estimator needs at least two pairs");
  }
  const double tau = detail::mean(pair_effects);
  double ss = 0.0;
  for (double e : pair_effects) ss += (e - tau) * (e - tau);
  return 2.0 * ss / static_cast<double>(pairs - 1);
}

VarianceReport paired_variance(const ObservedExperiment& obs) {
  if (obs.design().kind() != DesignKind::Paired) {
    throw Error(ErrorCode::NotPaired, "design is not a paired experiment");
  }
  const auto strata = split_by_arm(obs);
  std::vector<double> effects;
  effects.reserve(strata.size());
  for (const auto& s : strata) effects.push_back(s.treated.front() - s.control.front());
  VarianceReport report;
  report.method = VarianceMethod::PairedNeyman;
  report.sigma2_hat = paired_variance(effects);
  report.tau_hat = detail::mean(effects);
  return report;
}

// ---------------------------------------------------------------------------
// Normal approximation

ConfidenceInterval wald_ci(double tau_hat, double sigma2_hat, std::size_t n, double alpha,
                           std::string method_tag) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::DomainError, "alpha must lie in (0, 1)");
  }
  if (!(sigma2_hat >= 0.0)) {
    throw Error(ErrorCode::DomainError, "variance estimate must be non-negative");
  }
  const double half = normal_quantile(1.0 - alpha / 2.0) * std::sqrt(sigma2_hat) /
                      std::sqrt(static_cast<double>(n));
  return {tau_hat - half, tau_hat + half, alpha, std::move(method_tag)};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Algorithm AS241 (PPND16), Wichura 1988.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::DomainError, "normal quantile level must lie in (0, 1)");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        ((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
             6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
           1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
         1.3314166789178437745e+2) * r + 3.3871328727963666080e+0;
    const double den =
        ((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
             3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
           5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
         4.2313330701600911252e+1) * r + 1.0;
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        ((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
             2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
           3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
         4.63033784615654529590e+0) * r + 1.42343711074968357734e+0;
    const double den =
        ((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
             1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
           6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
         2.05319162663775882187e+0) * r + 1.0;
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
             1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
           2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
         5.46378491116411436990e+0) * r + 6.65790464350110377720e+0;
    const double den =
        ((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
             1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
           1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
         5.99832206555887937690e-1) * r + 1.0;
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

}  // namespace strataboot
