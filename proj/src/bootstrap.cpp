#include "strataboot/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "moments.hpp"
#include "strataboot/error.hpp"
#include "strataboot/parallel.hpp"
#include "strataboot/randomizer.hpp"

namespace strataboot {

namespace {

void validate_options(const BootstrapOptions& options) {
  if (options.replicates < kMinReplicates) {
    throw Error(ErrorCode::DomainError, "the bootstrap needs at least 100 replicates, got " +
                                            std::to_string(options.replicates));
  }
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw Error(ErrorCode::DomainError, "alpha must lie in (0, 1)");
  }
}

double degenerate_threshold(const FinitePopulation& pop) {
  double scale = 0.0;
  for (double v : pop.y1()) scale = std::max(scale, v * v);
  for (double v : pop.y0()) scale = std::max(scale, v * v);
  return kDegenerateRelTol * scale;
}

constexpr double kDegenerate = std::numeric_limits<double>::quiet_NaN();

BootstrapResult collect(const std::vector<double>& raw, const BootstrapOptions& options,
                        double tau_star) {
  BootstrapResult result;
  result.alpha = options.alpha;
  result.replicates = raw.size();
  result.tau_star = tau_star;
  result.t_stats.reserve(raw.size());
  for (double t : raw) {
    if (std::isnan(t)) {
      ++result.n_degenerate;
    } else {
      result.t_stats.push_back(t);
    }
  }
  if (static_cast<double>(result.n_degenerate) >
      kMaxDegenerateFraction * static_cast<double>(result.replicates)) {
    throw DegenerateBootstrapError(result.n_degenerate, result.replicates);
  }
  attach_quantiles(result);
  return result;
}

struct SharpScratch {
  std::vector<std::uint8_t> z;
  std::vector<std::size_t> indices;
  std::vector<ArmSample> arms;
};

}  // namespace

BootstrapResult bootstrap_sharp_from(const ObservedExperiment& obs, const ImputedPopulation& imputed,
                                     const BootstrapOptions& options) {
  validate_options(options);
  const auto& design = obs.design();
  if (design.kind() != DesignKind::SharpEligible) {
    throw Error(ErrorCode::NotSharpEligible, "the rank-preserving bootstrap needs a sharp-eligible design");
  }
  const auto& pop = imputed.population;
  const auto y1 = pop.y1();
  const auto y0 = pop.y0();

  // Visiting the members of a co-monotonic stratum in (y1, y0) order yields
  // both arms already sorted, whatever the assignment.
  std::vector<std::vector<std::size_t>> order(design.num_strata());
  for (std::size_t m = 0; m < design.num_strata(); ++m) {
    const auto members = design.members(m);
    order[m].assign(members.begin(), members.end());
    std::stable_sort(order[m].begin(), order[m].end(), [&](std::size_t a, std::size_t b) {
      return y1[a] < y1[b] || (y1[a] == y1[b] && y0[a] < y0[b]);
    });
  }

  const double threshold = degenerate_threshold(pop);
  const double root_n = std::sqrt(static_cast<double>(obs.size()));
  const std::size_t threads = resolve_threads(options.threads, options.replicates);
  std::vector<SharpScratch> scratch(threads);
  std::vector<double> raw(options.replicates);

  parallel_for_workers(options.replicates, threads, [&](std::size_t worker, std::size_t b) {
    auto& s = scratch[worker];
    s.z.resize(obs.size());
    s.arms.resize(design.num_strata());
    Rng rng(options.seed, b);
    draw_assignment(design, rng, s.z, s.indices);
    for (std::size_t m = 0; m < design.num_strata(); ++m) {
      auto& arm = s.arms[m];
      arm.treated.clear();
      arm.control.clear();
      for (std::size_t i : order[m]) {
        if (s.z[i]) {
          arm.treated.push_back(y1[i]);
        } else {
          arm.control.push_back(y0[i]);
        }
      }
      if (!std::is_sorted(arm.treated.begin(), arm.treated.end())) {
        std::sort(arm.treated.begin(), arm.treated.end());
      }
      if (!std::is_sorted(arm.control.begin(), arm.control.end())) {
        std::sort(arm.control.begin(), arm.control.end());
      }
    }
    const auto est = sharp_estimate_sorted(s.arms);
    raw[b] = est.sigma2_hat > threshold
                 ? root_n * (est.tau_hat - imputed.tau_star) / std::sqrt(est.sigma2_hat)
                 : kDegenerate;
  });
  return collect(raw, options, imputed.tau_star);
}

BootstrapResult bootstrap_stratified(const ObservedExperiment& obs, const BootstrapOptions& options) {
  validate_options(options);
  return bootstrap_sharp_from(obs, rank_preserving_impute(obs), options);
}

BootstrapResult bootstrap_paired_from(const ObservedExperiment& obs, const ImputedPopulation& imputed,
                                      const BootstrapOptions& options) {
  validate_options(options);
  const auto& design = obs.design();
  if (design.kind() != DesignKind::Paired) {
    throw Error(ErrorCode::NotPaired, "the constant-effect bootstrap needs a paired design");
  }
  if (design.num_strata() < 2) {
    throw Error(ErrorCode::TooFewPairs, "the paired bootstrap needs at least two pairs");
  }
  const auto y1 = imputed.population.y1();
  const auto y0 = imputed.population.y0();
  const double threshold = degenerate_threshold(imputed.population);
  const double root_n = std::sqrt(static_cast<double>(obs.size()));
  const std::size_t pairs = design.num_strata();
  const std::size_t threads = resolve_threads(options.threads, options.replicates);

  struct PairScratch {
    std::vector<std::uint8_t> z;
    std::vector<std::size_t> indices;
    std::vector<double> effects;
  };
  std::vector<PairScratch> scratch(threads);
  std::vector<double> raw(options.replicates);

  parallel_for_workers(options.replicates, threads, [&](std::size_t worker, std::size_t b) {
    auto& s = scratch[worker];
    s.z.resize(obs.size());
    s.effects.resize(pairs);
    Rng rng(options.seed, b);
    draw_assignment(design, rng, s.z, s.indices);
    for (std::size_t m = 0; m < pairs; ++m) {
      const auto members = design.members(m);
      const std::size_t treated = s.z[members[0]] ? members[0] : members[1];
      const std::size_t control = s.z[members[0]] ? members[1] : members[0];
      s.effects[m] = y1[treated] - y0[control];
    }
    const double tau = detail::mean(s.effects);
    const double sigma2 = paired_variance(s.effects);
    raw[b] = sigma2 > threshold ? root_n * (tau - imputed.tau_star) / std::sqrt(sigma2) : kDegenerate;
  });
  return collect(raw, options, imputed.tau_star);
}

BootstrapResult bootstrap_paired(const ObservedExperiment& obs, const BootstrapOptions& options,
                                 std::optional<double> delta) {
  validate_options(options);
  const auto report = paired_variance(obs);  // NotPaired / TooFewPairs
  return bootstrap_paired_from(obs, constant_effect_impute(obs, delta.value_or(report.tau_hat)),
                               options);
}

double empirical_quantile(std::span<const double> sorted_stats, double p) {
  if (sorted_stats.empty()) {
    throw Error(ErrorCode::EmptySample, "empirical quantile of an empty sample");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::DomainError, "quantile level must lie in (0, 1)");
  }
  const double k_real = static_cast<double>(sorted_stats.size()) * p;
  auto k = static_cast<std::size_t>(std::ceil(k_real));
  // K p within rounding of an integer selects that order statistic.
  if (k > 1 && k_real - static_cast<double>(k - 1) <= 1e-12 * k_real) --k;
  k = std::clamp<std::size_t>(k, 1, sorted_stats.size());
  return sorted_stats[k - 1];
}

void attach_quantiles(BootstrapResult& result) {
  std::vector<double> sorted = result.t_stats;
  std::sort(sorted.begin(), sorted.end());
  result.q_lo = empirical_quantile(sorted, result.alpha / 2.0);
  result.q_hi = empirical_quantile(sorted, 1.0 - result.alpha / 2.0);
}

ConfidenceInterval percentile_t_ci(double tau_hat, double sigma_hat, std::size_t n,
                                   const BootstrapResult& boot) {
  if (!(sigma_hat >= 0.0)) {
    throw Error(ErrorCode::DomainError, "studentizing scale must be non-negative");
  }
  const double scale = sigma_hat / std::sqrt(static_cast<double>(n));
  return {tau_hat - scale * boot.q_hi, tau_hat - scale * boot.q_lo, boot.alpha, "percentile-t"};
}

}  // namespace strataboot
