#include "strataboot/experiment.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <unordered_map>

#include "moments.hpp"
#include "strataboot/ecdf.hpp"
#include "strataboot/error.hpp"

namespace strataboot {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::EmptyStratumArm: return "EmptyStratumArm";
    case ErrorCode::NonFiniteOutcome: return "NonFiniteOutcome";
    case ErrorCode::SingletonStratum: return "SingletonStratum";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InsufficientArm: return "InsufficientArm";
    case ErrorCode::NotSharpEligible: return "NotSharpEligible";
    case ErrorCode::NotPaired: return "NotPaired";
    case ErrorCode::TooFewPairs: return "TooFewPairs";
    case ErrorCode::TooLargeToEnumerate: return "TooLargeToEnumerate";
    case ErrorCode::DegenerateBootstrap: return "DegenerateBootstrap";
    case ErrorCode::IdentityViolation: return "IdentityViolation";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

const char* to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::Paired: return "paired";
    case DesignKind::SharpEligible: return "sharp-eligible";
    case DesignKind::Other: return "other";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// StratifiedDesign

StratifiedDesign StratifiedDesign::from_counts(std::vector<StratumCounts> strata) {
  std::vector<std::size_t> unit_stratum;
  std::vector<std::size_t> treated;
  treated.reserve(strata.size());
  for (std::size_t m = 0; m < strata.size(); ++m) {
    unit_stratum.insert(unit_stratum.end(), strata[m].size, m);
    treated.push_back(strata[m].treated);
  }
  return StratifiedDesign(std::move(unit_stratum), std::move(treated));
}

StratifiedDesign::StratifiedDesign(std::vector<std::size_t> unit_stratum,
                                   std::vector<std::size_t> treated)
    : unit_stratum_(std::move(unit_stratum)) {
  const std::size_t num_strata = treated.size();
  if (num_strata == 0 || unit_stratum_.empty()) {
    throw Error(ErrorCode::InvalidInput, "a design needs at least one stratum and one unit");
  }
  strata_.resize(num_strata);
  members_.resize(num_strata);
  for (std::size_t i = 0; i < unit_stratum_.size(); ++i) {
    const std::size_t m = unit_stratum_[i];
    if (m >= num_strata) {
      throw Error(ErrorCode::InvalidInput, "unit refers to an unknown stratum");
    }
    members_[m].push_back(i);
  }
  for (std::size_t m = 0; m < num_strata; ++m) {
    strata_[m].size = members_[m].size();
    strata_[m].treated = treated[m];
    if (strata_[m].size == 0) {
      throw Error(ErrorCode::InvalidInput, "stratum " + std::to_string(m + 1) + " has no units");
    }
    if (treated[m] < 1 || treated[m] + 1 > strata_[m].size) {
      throw Error(ErrorCode::EmptyStratumArm,
                  "stratum " + std::to_string(m + 1) + " needs at least one treated and one control unit");
    }
  }
  kind_ = classify_design(*this);
}

double StratifiedDesign::weight(std::size_t m) const {
  return static_cast<double>(strata_.at(m).size) / static_cast<double>(unit_stratum_.size());
}

double StratifiedDesign::propensity(std::size_t m) const {
  return static_cast<double>(strata_.at(m).treated) / static_cast<double>(strata_.at(m).size);
}

DesignKind classify_design(const StratifiedDesign& design) {
  const auto strata = design.strata();
  const bool paired = std::all_of(strata.begin(), strata.end(), [](const StratumCounts& s) {
    return s.size == 2 && s.treated == 1;
  });
  if (paired) return DesignKind::Paired;
  const bool sharp = std::all_of(strata.begin(), strata.end(), [](const StratumCounts& s) {
    return s.treated >= 2 && s.treated + 2 <= s.size;
  });
  return sharp ? DesignKind::SharpEligible : DesignKind::Other;
}

StratumLabels normalize_strata(std::span<const std::string> labels) {
  StratumLabels out;
  out.unit_stratum.reserve(labels.size());
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& label : labels) {
    auto [it, inserted] = index.emplace(label, out.names.size());
    if (inserted) out.names.push_back(label);
    out.unit_stratum.push_back(it->second);
  }
  return out;
}

// ---------------------------------------------------------------------------
// FinitePopulation

FinitePopulation::FinitePopulation(std::span<const PopulationUnit> units) {
  if (units.empty()) {
    throw Error(ErrorCode::InvalidInput, "population has no units");
  }
  std::unordered_map<std::int64_t, std::size_t> index;
  unit_stratum_.reserve(units.size());
  y1_.reserve(units.size());
  y0_.reserve(units.size());
  for (const auto& u : units) {
    if (!std::isfinite(u.y1) || !std::isfinite(u.y0)) {
      throw Error(ErrorCode::NonFiniteOutcome, "potential outcomes must be finite");
    }
    auto [it, inserted] = index.emplace(u.stratum, stratum_ids_.size());
    if (inserted) stratum_ids_.push_back(u.stratum);
    unit_stratum_.push_back(it->second);
    y1_.push_back(u.y1);
    y0_.push_back(u.y0);
  }
  num_strata_ = stratum_ids_.size();
}

std::vector<std::size_t> FinitePopulation::stratum_sizes() const {
  std::vector<std::size_t> sizes(num_strata_, 0);
  for (std::size_t m : unit_stratum_) ++sizes[m];
  return sizes;
}

StratifiedDesign design_for(const FinitePopulation& pop, std::span<const std::size_t> treated) {
  if (treated.size() != pop.num_strata()) {
    throw Error(ErrorCode::InvalidInput, "one treated count per stratum is required");
  }
  return StratifiedDesign(std::vector<std::size_t>(pop.unit_stratum().begin(), pop.unit_stratum().end()),
                          std::vector<std::size_t>(treated.begin(), treated.end()));
}

// ---------------------------------------------------------------------------
// ObservedExperiment

StratifiedDesign validate_observed(std::span<const ObservationRow> rows) {
  if (rows.empty()) {
    throw Error(ErrorCode::InvalidInput, "experiment has no rows");
  }
  std::vector<std::string> labels;
  labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].z != 0 && rows[i].z != 1) {
      throw Error(ErrorCode::InvalidInput, "row " + std::to_string(i + 1) + ": z must be 0 or 1");
    }
    if (!std::isfinite(rows[i].y)) {
      throw Error(ErrorCode::NonFiniteOutcome, "row " + std::to_string(i + 1) + ": outcome is not finite");
    }
    labels.push_back(rows[i].stratum);
  }
  auto norm = normalize_strata(labels);
  std::vector<std::size_t> treated(norm.names.size(), 0);
  std::vector<std::size_t> sizes(norm.names.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    treated[norm.unit_stratum[i]] += static_cast<std::size_t>(rows[i].z);
    ++sizes[norm.unit_stratum[i]];
  }
  for (std::size_t m = 0; m < sizes.size(); ++m) {
    if (treated[m] == 0 || treated[m] == sizes[m]) {
      throw Error(ErrorCode::EmptyStratumArm,
                  "stratum '" + norm.names[m] + "' lacks " + (treated[m] == 0 ? "treated" : "control") + " units");
    }
  }
  return StratifiedDesign(std::move(norm.unit_stratum), std::move(treated));
}

ObservedExperiment::ObservedExperiment(std::vector<std::string> names,
                                       std::vector<std::size_t> unit_stratum,
                                       std::vector<std::uint8_t> z, std::vector<double> y)
    : names_(std::move(names)),
      z_(std::move(z)),
      y_(std::move(y)),
      design_([&] {
        std::vector<std::size_t> treated(names_.size(), 0);
        for (std::size_t i = 0; i < z_.size(); ++i) treated[unit_stratum[i]] += z_[i];
        return StratifiedDesign(std::move(unit_stratum), std::move(treated));
      }()) {}

ObservedExperiment ObservedExperiment::from_rows(std::span<const ObservationRow> rows) {
  validate_observed(rows);
  std::vector<std::string> labels;
  std::vector<std::uint8_t> z;
  std::vector<double> y;
  labels.reserve(rows.size());
  z.reserve(rows.size());
  y.reserve(rows.size());
  for (const auto& r : rows) {
    labels.push_back(r.stratum);
    z.push_back(static_cast<std::uint8_t>(r.z));
    y.push_back(r.y);
  }
  auto norm = normalize_strata(labels);
  return ObservedExperiment(std::move(norm.names), std::move(norm.unit_stratum), std::move(z),
                            std::move(y));
}

ObservedExperiment ObservedExperiment::observe(const FinitePopulation& pop,
                                               std::span<const std::uint8_t> z) {
  if (z.size() != pop.size()) {
    throw Error(ErrorCode::InvalidInput, "assignment length does not match the population");
  }
  std::vector<double> y(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) y[i] = z[i] ? pop.y1()[i] : pop.y0()[i];
  std::vector<std::string> names;
  for (auto id : pop.stratum_ids()) names.push_back(std::to_string(id));
  return ObservedExperiment(std::move(names),
                            std::vector<std::size_t>(pop.unit_stratum().begin(), pop.unit_stratum().end()),
                            std::vector<std::uint8_t>(z.begin(), z.end()), std::move(y));
}

// ---------------------------------------------------------------------------
// population_truth

PopulationTruth population_truth(const FinitePopulation& pop, const StratifiedDesign& design) {
  if (design.num_units() != pop.size() || design.num_strata() != pop.num_strata()) {
    throw Error(ErrorCode::InvalidInput, "design does not match the population");
  }
  const double n = static_cast<double>(pop.size());
  PopulationTruth t;
  std::vector<double> y1;
  std::vector<double> y0;
  std::vector<double> effect;
  for (std::size_t m = 0; m < design.num_strata(); ++m) {
    const auto members = design.members(m);
    if (members.size() < 2) {
      throw Error(ErrorCode::SingletonStratum,
                  "stratum " + std::to_string(m + 1) + " has a single unit; its variances are undefined");
    }
    y1.clear();
    y0.clear();
    effect.clear();
    for (std::size_t i : members) {
      y1.push_back(pop.y1()[i]);
      y0.push_back(pop.y0()[i]);
      effect.push_back(pop.y1()[i] - pop.y0()[i]);
    }
    const double nm = static_cast<double>(members.size());
    const double n1 = static_cast<double>(design.stratum(m).treated);
    const double n0 = nm - n1;
    const double pi = nm / n;
    const double m1 = detail::mean(y1);
    const double m0 = detail::mean(y0);
    const double tau_m = detail::mean(effect);
    const double s1 = detail::sample_variance(y1, m1);
    const double s0 = detail::sample_variance(y0, m0);
    const double s_tau = detail::sample_variance(effect, tau_m);
    const double s10 = detail::sample_covariance(y1, m1, y0, m0);
    const double integral = quantile_product_integral(Ecdf(y1), Ecdf(y0));
    const double s_upper = nm / (nm - 1.0) * (integral - m1 * m0);

    t.tau += pi * tau_m;
    t.sigma2 += n * pi * pi * (s1 / n1 + s0 / n0 - s_tau / nm);
    t.sigma2_cov += pi * (n0 / n1 * s1 + n1 / n0 * s0 + 2.0 * s10);
    t.sigma2_sharp += pi * (n0 / n1 * s1 + n1 / n0 * s0 + 2.0 * s_upper);
  }
  assert(std::abs(t.sigma2 - t.sigma2_cov) <= 1e-10 * std::max(1.0, std::abs(t.sigma2)));
  return t;
}

}  // namespace strataboot
