#include "strataboot/imputation.hpp"

#include <algorithm>

#include "strataboot/ecdf.hpp"
#include "strataboot/error.hpp"
#include "strataboot/estimators.hpp"

namespace strataboot {

namespace {

ImputedPopulation finish(const ObservedExperiment& obs, const std::vector<double>& y1,
                         const std::vector<double>& y0) {
  std::vector<PopulationUnit> units(obs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    units[i] = {static_cast<std::int64_t>(obs.design().unit_stratum()[i]) + 1, y1[i], y0[i]};
    total += y1[i] - y0[i];
  }
  return {FinitePopulation(units), total / static_cast<double>(obs.size())};
}

}  // namespace

ImputedPopulation rank_preserving_impute(const ObservedExperiment& obs) {
  const auto& design = obs.design();
  if (design.kind() != DesignKind::SharpEligible) {
    throw Error(ErrorCode::NotSharpEligible,
                "rank-preserving imputation needs 2 <= n_m1 <= n_m - 2 in every stratum (design is " +
                    std::string(to_string(design.kind())) + ")");
  }
  const auto arms = split_by_arm(obs);
  std::vector<double> y1(obs.size());
  std::vector<double> y0(obs.size());
  std::vector<std::size_t> treated_units;
  std::vector<std::size_t> control_units;
  for (std::size_t m = 0; m < design.num_strata(); ++m) {
    const Ecdf treated(arms[m].treated);
    const Ecdf control(arms[m].control);
    treated_units.clear();
    control_units.clear();
    for (std::size_t i : design.members(m)) (obs.z()[i] ? treated_units : control_units).push_back(i);
    // Tied outcomes take consecutive ranks in unit order, so a run of ties
    // spreads over the other arm's quantiles instead of piling onto the top
    // one. Without ties the rank is n_z times the ECDF value.
    auto by_outcome = [&](std::size_t a, std::size_t b) { return obs.y()[a] < obs.y()[b]; };
    std::stable_sort(treated_units.begin(), treated_units.end(), by_outcome);
    std::stable_sort(control_units.begin(), control_units.end(), by_outcome);
    for (std::size_t r = 0; r < treated_units.size(); ++r) {
      const std::size_t i = treated_units[r];
      y1[i] = obs.y()[i];
      y0[i] = control.quantile_at(r + 1, treated.size());
    }
    for (std::size_t r = 0; r < control_units.size(); ++r) {
      const std::size_t i = control_units[r];
      y0[i] = obs.y()[i];
      y1[i] = treated.quantile_at(r + 1, control.size());
    }
  }
  return finish(obs, y1, y0);
}

std::vector<std::size_t> copy_counts(std::size_t stratum_size, std::size_t arm_size) {
  if (arm_size == 0 || arm_size > stratum_size) {
    throw Error(ErrorCode::DomainError, "copy_counts needs 1 <= arm size <= stratum size");
  }
  auto ceil_div = [](std::size_t a, std::size_t b) { return (a + b - 1) / b; };
  std::vector<std::size_t> counts(arm_size);
  for (std::size_t j = 1; j <= arm_size; ++j) {
    counts[j - 1] = ceil_div(j * stratum_size, arm_size) - ceil_div((j - 1) * stratum_size, arm_size);
  }
  return counts;
}

ImputedPopulation constant_effect_impute(const ObservedExperiment& obs, double delta) {
  std::vector<double> y1(obs.size());
  std::vector<double> y0(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double y = obs.y()[i];
    y1[i] = obs.z()[i] ? y : y + delta;
    y0[i] = obs.z()[i] ? y - delta : y;
  }
  auto imputed = finish(obs, y1, y0);
  // Floating-point (y + d) - y need not equal d; the imputed effect is delta by definition.
  imputed.tau_star = delta;
  return imputed;
}

}  // namespace strataboot
