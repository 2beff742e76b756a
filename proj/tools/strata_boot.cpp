// strata-boot: command-line front end. Argument parsing only; the commands
// live in the library (cli_io).
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "strataboot/cli_io.hpp"

namespace {

template <typename T>
std::optional<T> present(const CLI::Option* opt, const T& value) {
  return opt->count() ? std::optional<T>(value) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace strataboot;

  CLI::App app{"Design-based inference for stratified and paired randomized experiments"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker threads (default: STRATA_BOOT_THREADS or all cores)");

  AnalyzeCommand analyze;
  std::uint64_t analyze_seed = 0;
  double delta = 0.0;
  auto* a = app.add_subcommand("analyze", "confidence interval for the average treatment effect");
  a->add_option("--data", analyze.data_path, "CSV with columns stratum (or pair), z, y")->required();
  a->add_option("--method", analyze.method,
                "neyman-normal | sharp-normal | sharp-boot | pair-normal | pair-boot")
      ->capture_default_str();
  a->add_option("--alpha", analyze.alpha, "1 - confidence level")->capture_default_str();
  a->add_option("-B,--replicates", analyze.replicates, "bootstrap replicates")->capture_default_str();
  auto* delta_opt = a->add_option("--delta", delta, "constant effect imputed by pair-boot (default tau_hat)");
  auto* a_seed = a->add_option("--seed", analyze_seed, "random seed (default: entropy, printed)");
  a->add_option("-o,--output", analyze.output_path, "JSON output file (default stdout)");
  a->add_option("--emit-plot-data", analyze.plot_path, "write ECDF / Q-Q coordinates as CSV");

  SimulateCommand simulate;
  std::uint64_t simulate_seed = 0;
  auto* s = app.add_subcommand("simulate", "run a batch of simulation scenarios");
  s->add_option("--config", simulate.config_path, "TOML or JSON scenario file")->required();
  auto* s_seed = s->add_option("--seed", simulate_seed, "random seed (overrides the config)");
  s->add_option("-o,--output", simulate.output_path, "CSV output file (default stdout)");

  EnumerateCommand enumerate;
  auto* e = app.add_subcommand("enumerate", "exact randomization distribution of a small population");
  e->add_option("--data", enumerate.data_path, "CSV with columns stratum, y1, y0 and optional z")
      ->required();
  e->add_option("--mode", enumerate.mode, "distribution | identities")->capture_default_str();
  e->add_option("-o,--output", enumerate.output_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : exit_code::kInput;
  }

  if (a->parsed()) {
    analyze.seed = present(a_seed, analyze_seed);
    analyze.delta = present(delta_opt, delta);
    analyze.threads = threads;
    return cmd_analyze(analyze, std::cout, std::cerr);
  }
  if (s->parsed()) {
    simulate.seed = present(s_seed, simulate_seed);
    simulate.threads = threads;
    return cmd_simulate(simulate, std::cout, std::cerr);
  }
  return cmd_enumerate(enumerate, std::cout, std::cerr);
}
