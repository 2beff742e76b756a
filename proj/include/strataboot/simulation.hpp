#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "strataboot/experiment.hpp"
#include "strataboot/random.hpp"

namespace strataboot {

enum class CaseKind {
  StratifiedAdditive,      // Y(0) = Y(1)
  StratifiedComonotonic,   // independent draws, sorted together within stratum
  StratifiedDependent,     // Y(0) = Y(1) + N(0, 0.5^2)
  StratifiedIndependent,
  PairedAdditive,
  PairedIndependent,
};

const char* to_string(CaseKind kind);
bool is_paired(CaseKind kind);

struct Distribution {
  enum class Kind { Gamma, Normal, Uniform, Pareto };
  Kind kind = Kind::Gamma;
  // Gamma(shape, scale), Normal(mean, sd), Uniform(a, b), Pareto(scale, shape).
  double a = 1.0;
  double b = 1.0;

  double sample(Rng& rng) const;
  std::string label() const;
};

enum class Propensity { Equal, Unequal };

struct DgpSpec {
  CaseKind kind = CaseKind::StratifiedAdditive;
  std::size_t strata = 10;        // M; number of pairs for paired cases
  std::size_t stratum_size = 10;  // ignored for paired cases
  Distribution distribution;
  Propensity propensity = Propensity::Equal;
  std::uint64_t population_seed = 1;
};

// Throws InvalidInput / DomainError on a spec that cannot produce a design.
void validate_spec(const DgpSpec& spec);

// Treated counts: 0.5 n_m, or round(0.4 n_m) for the first ceil(M/2) strata
// and round(0.6 n_m) for the rest. Paired specs give M pairs with one treated.
StratifiedDesign spec_design(const DgpSpec& spec);

// Potential outcomes drawn once from population_seed; stratum ids 1..M with
// units of a stratum contiguous.
FinitePopulation generate_population(const DgpSpec& spec);

struct MethodSummary {
  std::string method;  // neyman-normal, sharp-normal, sharp-boot, pair-normal, pair-boot
  std::size_t covered = 0;
  double coverage = 0.0;
  double mean_length = 0.0;
};

struct SimReport {
  std::vector<MethodSummary> methods;
  double tau = 0.0;
  double sigma2 = 0.0;
  double ratio = 0.0;  // mean sqrt(sigma2_S_hat / sigma2); stratified only
  std::size_t negative_sharp = 0;  // replications whose sharp estimate was clipped at 0
  std::size_t replications = 0;
  std::size_t replicates = 0;  // B
};

struct StudyOptions {
  std::size_t replications = 1000;
  std::size_t replicates = 1000;  // B; 0 skips the bootstrap method
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

// Replication r draws its assignment from stream r of the assignment seed and
// bootstraps with a seed derived from (seed, r); replications run in parallel
// and are reduced in index order. Throws DomainError when replications < 100.
SimReport run_stratified_study(const DgpSpec& spec, const StudyOptions& options);
SimReport run_paired_study(const DgpSpec& spec, const StudyOptions& options);

// Dispatches on is_paired(spec.kind).
SimReport run_study(const DgpSpec& spec, const StudyOptions& options);

}  // namespace strataboot
