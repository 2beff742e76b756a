#include "strataboot/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "strataboot/bootstrap.hpp"
#include "strataboot/error.hpp"
#include "strataboot/estimators.hpp"
#include "strataboot/parallel.hpp"
#include "strataboot/randomizer.hpp"

namespace strataboot {

namespace {

// Salts separating the population, assignment and bootstrap streams of a study.
constexpr std::uint64_t kAssignmentSalt = 0x61737367;
constexpr std::uint64_t kBootstrapSalt = 0x626f6f74;

struct Replication {
  bool covered[3] = {false, false, false};
  double length[3] = {0.0, 0.0, 0.0};
  double ratio = 0.0;
  bool negative = false;
};

MethodSummary summarize(const std::string& method, const std::vector<Replication>& reps,
                        std::size_t slot) {
  MethodSummary s;
  s.method = method;
  double total = 0.0;
  for (const auto& r : reps) {
    s.covered += r.covered[slot] ? 1 : 0;
    total += r.length[slot];
  }
  s.coverage = static_cast<double>(s.covered) / static_cast<double>(reps.size());
  s.mean_length = total / static_cast<double>(reps.size());
  return s;
}

void validate_options(const StudyOptions& options) {
  if (options.replications < 100) {
    throw Error(ErrorCode::DomainError, "a study needs at least 100 replications");
  }
  if (options.replicates != 0 && options.replicates < kMinReplicates) {
    throw Error(ErrorCode::DomainError, "B must be 0 or at least 100");
  }
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw Error(ErrorCode::DomainError, "alpha must lie in (0, 1)");
  }
}

ObservedExperiment draw_experiment(const FinitePopulation& pop, const StratifiedDesign& design,
                                   const StudyOptions& options, std::size_t r) {
  Rng rng(derive_seed(options.seed, kAssignmentSalt), r);
  return ObservedExperiment::observe(pop, draw_assignment(design, rng));
}

BootstrapOptions inner_options(const StudyOptions& options, std::size_t r) {
  BootstrapOptions boot;
  boot.replicates = options.replicates;
  boot.alpha = options.alpha;
  boot.seed = derive_seed(derive_seed(options.seed, kBootstrapSalt), r);
  boot.threads = 1;  // parallelism lives at the replication level
  return boot;
}

}  // namespace

const char* to_string(CaseKind kind) {
  switch (kind) {
    case CaseKind::StratifiedAdditive: return "stratified-1";
    case CaseKind::StratifiedComonotonic: return "stratified-2";
    case CaseKind::StratifiedDependent: return "stratified-3";
    case CaseKind::StratifiedIndependent: return "stratified-4";
    case CaseKind::PairedAdditive: return "paired-1";
    case CaseKind::PairedIndependent: return "paired-2";
  }
  return "?";
}

bool is_paired(CaseKind kind) {
  return kind == CaseKind::PairedAdditive || kind == CaseKind::PairedIndependent;
}

double Distribution::sample(Rng& rng) const {
  switch (kind) {
    case Kind::Gamma: return rng.gamma(a, b);
    case Kind::Normal: return a + b * rng.normal();
    case Kind::Uniform: return rng.uniform(a, b);
    case Kind::Pareto: return rng.pareto(a, b);
  }
  return 0.0;
}

std::string Distribution::label() const {
  std::ostringstream out;
  out.precision(6);
  switch (kind) {
    case Kind::Gamma: out << "gamma"; break;
    case Kind::Normal: out << "normal"; break;
    case Kind::Uniform: out << "uniform"; break;
    case Kind::Pareto: out << "pareto"; break;
  }
  out << '(' << a << ';' << b << ')';
  return out.str();
}

void validate_spec(const DgpSpec& spec) {
  const auto& d = spec.distribution;
  bool ok = std::isfinite(d.a) && std::isfinite(d.b);
  switch (d.kind) {
    case Distribution::Kind::Gamma:
    case Distribution::Kind::Pareto: ok = ok && d.a > 0.0 && d.b > 0.0; break;
    case Distribution::Kind::Normal: ok = ok && d.b > 0.0; break;
    case Distribution::Kind::Uniform: ok = ok && d.a < d.b; break;
  }
  if (!ok) throw Error(ErrorCode::DomainError, "invalid distribution parameters " + d.label());
  if (spec.strata == 0) throw Error(ErrorCode::InvalidInput, "a study needs at least one stratum");
  if (is_paired(spec.kind)) {
    if (spec.strata < 2) throw Error(ErrorCode::TooFewPairs, "a paired study needs at least two pairs");
  } else if (spec.stratum_size < 2) {
    throw Error(ErrorCode::InvalidInput, "strata need at least two units");
  }
}

StratifiedDesign spec_design(const DgpSpec& spec) {
  validate_spec(spec);
  std::vector<StratumCounts> counts;
  if (is_paired(spec.kind)) {
    counts.assign(spec.strata, StratumCounts{2, 1});
    return StratifiedDesign::from_counts(std::move(counts));
  }
  const std::size_t first_half = (spec.strata + 1) / 2;
  for (std::size_t m = 0; m < spec.strata; ++m) {
    double rho = 0.5;
    if (spec.propensity == Propensity::Unequal) rho = m < first_half ? 0.4 : 0.6;
    const auto treated =
        static_cast<std::size_t>(std::llround(rho * static_cast<double>(spec.stratum_size)));
    counts.push_back({spec.stratum_size, treated});
  }
  return StratifiedDesign::from_counts(std::move(counts));
}

FinitePopulation generate_population(const DgpSpec& spec) {
  validate_spec(spec);
  Rng rng(spec.population_seed, 0);
  const std::size_t size = is_paired(spec.kind) ? 2 : spec.stratum_size;
  std::vector<PopulationUnit> units;
  units.reserve(spec.strata * size);
  std::vector<double> y1(size);
  std::vector<double> y0(size);
  for (std::size_t m = 0; m < spec.strata; ++m) {
    for (std::size_t i = 0; i < size; ++i) y1[i] = spec.distribution.sample(rng);
    switch (spec.kind) {
      case CaseKind::StratifiedAdditive:
      case CaseKind::PairedAdditive:
        y0 = y1;
        break;
      case CaseKind::StratifiedComonotonic:
        for (std::size_t i = 0; i < size; ++i) y0[i] = spec.distribution.sample(rng);
        std::sort(y1.begin(), y1.end());
        std::sort(y0.begin(), y0.end());
        break;
      case CaseKind::StratifiedDependent:
        for (std::size_t i = 0; i < size; ++i) y0[i] = y1[i] + 0.5 * rng.normal();
        break;
      case CaseKind::StratifiedIndependent:
      case CaseKind::PairedIndependent:
        for (std::size_t i = 0; i < size; ++i) y0[i] = spec.distribution.sample(rng);
        break;
    }
    for (std::size_t i = 0; i < size; ++i) {
      units.push_back({static_cast<std::int64_t>(m + 1), y1[i], y0[i]});
    }
  }
  return FinitePopulation(units);
}

SimReport run_stratified_study(const DgpSpec& spec, const StudyOptions& options) {
  if (is_paired(spec.kind)) {
    throw Error(ErrorCode::InvalidInput, "run_stratified_study needs a stratified case");
  }
  validate_options(options);
  const auto pop = generate_population(spec);
  const auto design = spec_design(spec);
  const auto truth = population_truth(pop, design);
  const std::size_t n = pop.size();

  std::vector<Replication> reps(options.replications);
  parallel_for(options.replications, options.threads, [&](std::size_t r) {
    const auto obs = draw_experiment(pop, design, options, r);
    const auto neyman = neyman_variance(obs);
    const auto sharp = sharp_variance(obs);
    const double s2 = std::max(0.0, sharp.sigma2_hat);
    auto& rep = reps[r];
    rep.negative = sharp.sigma2_hat < 0.0;
    rep.ratio = std::sqrt(s2 / truth.sigma2);

    const auto nn = wald_ci(neyman.tau_hat, neyman.sigma2_hat, n, options.alpha);
    const auto sn = wald_ci(sharp.tau_hat, s2, n, options.alpha);
    rep.covered[0] = nn.covers(truth.tau);
    rep.length[0] = nn.length();
    rep.covered[1] = sn.covers(truth.tau);
    rep.length[1] = sn.length();
    if (options.replicates > 0) {
      const auto boot = bootstrap_stratified(obs, inner_options(options, r));
      const auto sb = percentile_t_ci(sharp.tau_hat, std::sqrt(s2), n, boot);
      rep.covered[2] = sb.covers(truth.tau);
      rep.length[2] = sb.length();
    }
  });

  SimReport report;
  report.tau = truth.tau;
  report.sigma2 = truth.sigma2;
  report.replications = options.replications;
  report.replicates = options.replicates;
  report.methods.push_back(summarize("neyman-normal", reps, 0));
  report.methods.push_back(summarize("sharp-normal", reps, 1));
  if (options.replicates > 0) report.methods.push_back(summarize("sharp-boot", reps, 2));
  double ratio = 0.0;
  for (const auto& r : reps) {
    ratio += r.ratio;
    report.negative_sharp += r.negative ? 1 : 0;
  }
  report.ratio = ratio / static_cast<double>(reps.size());
  return report;
}

SimReport run_paired_study(const DgpSpec& spec, const StudyOptions& options) {
  if (!is_paired(spec.kind)) {
    throw Error(ErrorCode::NotPaired, "run_paired_study needs a paired case");
  }
  validate_options(options);
  const auto pop = generate_population(spec);
  const auto design = spec_design(spec);
  const auto truth = population_truth(pop, design);
  const std::size_t n = pop.size();

  std::vector<Replication> reps(options.replications);
  parallel_for(options.replications, options.threads, [&](std::size_t r) {
    const auto obs = draw_experiment(pop, design, options, r);
    const auto pair = paired_variance(obs);
    auto& rep = reps[r];
    const auto pn = wald_ci(pair.tau_hat, pair.sigma2_hat, n, options.alpha);
    rep.covered[0] = pn.covers(truth.tau);
    rep.length[0] = pn.length();
    if (options.replicates > 0) {
      const auto boot = bootstrap_paired(obs, inner_options(options, r));
      const auto pb = percentile_t_ci(pair.tau_hat, std::sqrt(pair.sigma2_hat), n, boot);
      rep.covered[1] = pb.covers(truth.tau);
      rep.length[1] = pb.length();
    }
  });

  SimReport report;
  report.tau = truth.tau;
  report.sigma2 = truth.sigma2;
  report.ratio = std::nan("");
  report.replications = options.replications;
  report.replicates = options.replicates;
  report.methods.push_back(summarize("pair-normal", reps, 0));
  if (options.replicates > 0) report.methods.push_back(summarize("pair-boot", reps, 1));
  return report;
}

SimReport run_study(const DgpSpec& spec, const StudyOptions& options) {
  return is_paired(spec.kind) ? run_paired_study(spec, options) : run_stratified_study(spec, options);
}

}  // namespace strataboot
