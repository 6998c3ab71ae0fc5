// coherelab: sweep / verify / average / maximize / state.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "coherelab/experiments.hpp"
#include "coherelab/qstate.hpp"
#include "json.hpp"

namespace {

int usage_failure(const std::string& message) {
  std::cerr << nlohmann::json{{"error", "UsageError"}, {"message", message}}.dump() << '\n';
  return static_cast<int>(coherelab::ExitCode::UsageError);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherence/mixedness trade-off toolkit"};
  app.require_subcommand(1, 1);
  app.allow_extras(false);

  std::string dims_text = "2,3,4,5";
  std::optional<long> samples;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::string> format;
  std::optional<double> tolerance;
  std::optional<long> budget;
  int restarts = 5;
  int workers = 1;
  std::optional<std::string> state_path;

  const char* names[][2] = {{"sweep", "CSV of trade-off reports for random states"},
                            {"verify", "run every verification suite"},
                            {"average", "Monte Carlo averages against closed forms"},
                            {"maximize", "optimizer maxima against closed forms"},
                            {"state", "emit random states with spectra and reports"}};
  for (const auto& [name, help] : names) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--dims", dims_text, "dimensions, e.g. 2,3,4,5 or 2-5");
    sub->add_option("--samples", samples, "states (or Haar samples for average) per dimension");
    sub->add_option("--seed", seed, "master seed (fallback: $COHERELAB_SEED, then 42)");
    sub->add_option("--out", out, "output path (default stdout)");
    sub->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--tolerance", tolerance, "uniform residual/violation tolerance");
    sub->add_option("--budget", budget, "optimizer evaluations per start (default 5000 d^2)");
    sub->add_option("--restarts", restarts, "optimizer starts (default 5)");
    sub->add_option("--workers", workers, "worker threads (output does not depend on it)");
    sub->add_option("--state", state_path, "JSON density matrix replacing the random state");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage_failure(e.what());
  }

  coherelab::ExperimentConfig config;
  config.command = app.get_subcommands().front()->get_name();
  try {
    config.dims = coherelab::parse_dims(dims_text);
    config.seed = coherelab::resolve_seed(seed, std::getenv(coherelab::kSeedEnvVar));
  } catch (const coherelab::Error& e) {
    return usage_failure(e.what());
  }
  config.samples = samples;
  config.out = out;
  config.format = format;
  config.tolerance = tolerance;
  config.budget = budget;
  config.restarts = restarts;
  config.workers = workers;
  config.state_path = state_path;
  return static_cast<int>(coherelab::run_experiment(config, std::cout, std::cerr));
}
