#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace strataboot {

enum class DesignKind {
  Paired,         // every stratum has two units, one treated
  SharpEligible,  // 2 <= n_m1 <= n_m - 2 in every stratum
  Other,          // Neyman + normal approximation only
};

const char* to_string(DesignKind kind);

struct StratumCounts {
  std::size_t size = 0;
  std::size_t treated = 0;

  std::size_t control() const noexcept { return size - treated; }
};

// Stratum sizes and treated counts, together with the unit -> stratum layout
// that assignment vectors are aligned to. Strata are indexed 0..M-1 internally.
class StratifiedDesign {
 public:
  // Units laid out contiguously, stratum by stratum.
  static StratifiedDesign from_counts(std::vector<StratumCounts> strata);

  // unit_stratum[i] is the dense stratum index of unit i; every index in
  // [0, treated.size()) must appear at least once.
  StratifiedDesign(std::vector<std::size_t> unit_stratum, std::vector<std::size_t> treated);

  std::size_t num_units() const noexcept { return unit_stratum_.size(); }
  std::size_t num_strata() const noexcept { return strata_.size(); }
  std::span<const StratumCounts> strata() const noexcept { return strata_; }
  const StratumCounts& stratum(std::size_t m) const { return strata_.at(m); }
  std::span<const std::size_t> unit_stratum() const noexcept { return unit_stratum_; }
  std::span<const std::size_t> members(std::size_t m) const { return members_.at(m); }

  // pi_m = n_m / n
  double weight(std::size_t m) const;
  // rho_m = n_m1 / n_m
  double propensity(std::size_t m) const;

  DesignKind kind() const noexcept { return kind_; }

 private:
  std::vector<StratumCounts> strata_;
  std::vector<std::size_t> unit_stratum_;
  std::vector<std::vector<std::size_t>> members_;
  DesignKind kind_ = DesignKind::Other;
};

DesignKind classify_design(const StratifiedDesign& design);

// Dense stratum ids in order of first appearance.
struct StratumLabels {
  std::vector<std::string> names;        // names[m] is the input label of stratum m
  std::vector<std::size_t> unit_stratum;  // per unit
};

StratumLabels normalize_strata(std::span<const std::string> labels);

struct PopulationUnit {
  std::int64_t stratum = 0;
  double y1 = 0.0;
  double y0 = 0.0;
};

// Both potential outcomes of every unit. Ground truth for simulation and
// enumeration; never available for a real experiment.
class FinitePopulation {
 public:
  explicit FinitePopulation(std::span<const PopulationUnit> units);

  std::size_t size() const noexcept { return y1_.size(); }
  std::size_t num_strata() const noexcept { return num_strata_; }
  std::span<const std::size_t> unit_stratum() const noexcept { return unit_stratum_; }
  std::span<const double> y1() const noexcept { return y1_; }
  std::span<const double> y0() const noexcept { return y0_; }
  std::span<const std::int64_t> stratum_ids() const noexcept { return stratum_ids_; }

  // Stratum sizes; the number of treated units is a property of the design.
  std::vector<std::size_t> stratum_sizes() const;

 private:
  std::vector<std::size_t> unit_stratum_;
  std::vector<double> y1_;
  std::vector<double> y0_;
  std::vector<std::int64_t> stratum_ids_;
  std::size_t num_strata_ = 0;
};

// Builds a design for `pop` with the given treated count per dense stratum.
StratifiedDesign design_for(const FinitePopulation& pop, std::span<const std::size_t> treated);

struct ObservationRow {
  std::string stratum;
  int z = 0;
  double y = 0.0;
};

// One realized experiment: stratum, assignment and observed outcome per unit.
class ObservedExperiment {
 public:
  // Validates the rows (see validate_observed) and normalizes stratum labels.
  static ObservedExperiment from_rows(std::span<const ObservationRow> rows);

  // Observed outcomes Y_i = Z_i Y_i(1) + (1 - Z_i) Y_i(0) of a population.
  static ObservedExperiment observe(const FinitePopulation& pop, std::span<const std::uint8_t> z);

  std::size_t size() const noexcept { return y_.size(); }
  const StratifiedDesign& design() const noexcept { return design_; }
  std::span<const std::uint8_t> z() const noexcept { return z_; }
  std::span<const double> y() const noexcept { return y_; }
  std::span<const std::string> stratum_names() const noexcept { return names_; }

 private:
  ObservedExperiment(std::vector<std::string> names, std::vector<std::size_t> unit_stratum,
                     std::vector<std::uint8_t> z, std::vector<double> y);

  std::vector<std::string> names_;
  std::vector<std::uint8_t> z_;
  std::vector<double> y_;
  StratifiedDesign design_;
};

// Derives the design implied by the rows. Throws EmptyStratumArm if a stratum
// lacks a treated or a control unit, NonFiniteOutcome on NaN/Inf, and
// InvalidInput on an empty table or z outside {0, 1}.
StratifiedDesign validate_observed(std::span<const ObservationRow> rows);

struct EstimandReport {
  double tau_hat = 0.0;
  std::vector<double> tau_hat_stratum;
  std::vector<double> weights;
};

struct PopulationTruth {
  double tau = 0.0;
  double sigma2 = 0.0;         // Var(sqrt(n) tau_hat), stratum-variance decomposition
  double sigma2_cov = 0.0;     // same quantity through the covariance decomposition
  double sigma2_sharp = 0.0;   // sharp upper bound from the true marginals
};

// Exact finite-population estimand and variances for `pop` under `design`.
// Throws SingletonStratum if some stratum has fewer than two units.
PopulationTruth population_truth(const FinitePopulation& pop, const StratifiedDesign& design);

}  // namespace strataboot
