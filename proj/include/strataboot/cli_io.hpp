#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "strataboot/analysis.hpp"
#include "strataboot/error.hpp"
#include "strataboot/experiment.hpp"
#include "strataboot/simulation.hpp"

namespace strataboot {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // identity check failed, I/O trouble
inline constexpr int kInput = 2;
inline constexpr int kMismatch = 3;
inline constexpr int kTooLarge = 4;
}  // namespace exit_code

int exit_code_for(ErrorCode code);

// Long-format observations with header columns stratum (or pair), z, y in any
// order. Errors name the offending line and are raised as InvalidInput or
// NonFiniteOutcome.
std::vector<ObservationRow> read_observations(std::istream& in);

// Population file for enumeration: stratum, y1, y0 and an optional z column.
// With z the treated count of each stratum is the number of z = 1 rows;
// without it each stratum treats floor(n_m / 2) units.
struct PopulationFile {
  std::vector<PopulationUnit> units;
  std::vector<std::size_t> treated;  // per dense stratum
};
PopulationFile read_population(std::istream& in);

// Subset of TOML used by the bundled configs: top-level and [table] /
// [[array]] headers, key = value with strings, integers, floats, booleans and
// single-line arrays, and # comments. Throws InvalidInput with the line number.
nlohmann::json parse_toml(std::istream& in);

struct Scenario {
  std::string name;
  DgpSpec spec;
  StudyOptions options;
};

// Accepts the TOML subset or JSON (chosen by a leading '{'). Top-level
// replications / replicates / alpha / population_seeds are defaults that
// a [[scenario]] may override; a scenario with population_seeds expands to
// one scenario per seed. Study seeds are derived from `seed` and the
// position of the expanded scenario. Throws InvalidInput.
std::vector<Scenario> load_scenarios(const nlohmann::json& config, std::uint64_t seed);
nlohmann::json read_config(std::istream& in);

// Shortest decimal string that parses back to the same double.
std::string format_real(double value);

nlohmann::json to_json(const AnalysisResult& result, const ObservedExperiment& obs);

// ECDF and normal Q-Q coordinates of the observed outcomes per arm:
// series,arm,x,y.
void write_plot_data(std::ostream& out, const ObservedExperiment& obs,
                     const std::optional<BootstrapResult>& boot);

struct AnalyzeCommand {
  std::string data_path;
  std::string method = "neyman-normal";
  double alpha = 0.05;
  std::size_t replicates = 1000;
  std::optional<double> delta;
  std::optional<std::uint64_t> seed;
  std::string output_path;  // empty: stdout
  std::string plot_path;
  std::size_t threads = 0;
};

struct SimulateCommand {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string output_path;
  std::size_t threads = 0;
};

struct EnumerateCommand {
  std::string data_path;
  std::string mode = "distribution";  // or identities
  std::string output_path;
};

// Each command writes its document to the output path (or `out`) and
// diagnostics to `err`, and returns the process exit code.
int cmd_analyze(const AnalyzeCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_enumerate(const EnumerateCommand& cmd, std::ostream& out, std::ostream& err);

// Picks a seed from std::random_device when none was given and reports it on
// `err` for replay.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& err);

}  // namespace strataboot
