#pragma once

#include <cstddef>
#include <vector>

#include "strataboot/experiment.hpp"

namespace strataboot {

// A completed table of potential outcomes from which bootstrap experiments
// are drawn. Unit order and stratum indexing match the source experiment.
struct ImputedPopulation {
  FinitePopulation population;
  double tau_star = 0.0;  // ATE of the imputed table
};

// Fills each missing potential outcome with the same-rank quantile of the
// other arm in the same stratum: a treated unit gets F^-1(G(Y_i)), a control
// unit G^-1(F(Y_i)), with G/F the treated/control ECDFs of the stratum. The
// result is co-monotonic within every stratum. Tied outcomes are ranked in
// unit order, so each completed arm is exactly the copy_counts expansion of
// the observed one.
// Throws NotSharpEligible unless 2 <= n_m1 <= n_m - 2 everywhere.
ImputedPopulation rank_preserving_impute(const ObservedExperiment& obs);

// Number of copies of the j-th largest observed value of an arm of size
// `arm_size` in its rank-preserving completion to `stratum_size` values:
// ceil(j n / n_z) - ceil((j - 1) n / n_z). Entry 0 belongs to the maximum.
std::vector<std::size_t> copy_counts(std::size_t stratum_size, std::size_t arm_size);

// y1 = Y + delta (1 - Z), y0 = Y - delta Z, so every imputed effect is delta.
ImputedPopulation constant_effect_impute(const ObservedExperiment& obs, double delta);

}  // namespace strataboot
