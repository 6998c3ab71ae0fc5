#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coherelab {

/// Process exit codes shared by every command.
enum class ExitCode : int { Pass = 0, CheckFailure = 1, UsageError = 2, NumericalFailure = 3 };

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr const char* kSeedEnvVar = "COHERELAB_SEED";

struct ExperimentConfig {
  std::string command;
  std::vector<int> dims{2, 3, 4, 5};
  /// Unset means the per-command default (see README).
  std::optional<long> samples;
  std::uint64_t seed = kDefaultSeed;
  /// Empty writes to the provided stream.
  std::string out;
  /// Unset means csv for sweep and json otherwise.
  std::optional<std::string> format;
  std::optional<double> tolerance;
  /// Per-start evaluation cap; unset means 5000 d^2.
  std::optional<long> budget;
  int restarts = 5;
  int workers = 1;
  /// JSON density matrix that replaces the random state (average, verify).
  std::optional<std::string> state_path;
};

/// --seed wins, then the environment variable, then kDefaultSeed.
/// Throws Error(InvalidArgument) when the environment value is not an integer.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, const char* env_value);

/// Parses "2,3,5" or ranges like "2-5" (mixable: "2,4-6").
std::vector<int> parse_dims(const std::string& text);

/// Checks the config, runs the command and writes its output to config.out
/// (or `out` when that is empty). Errors become a JSON object
/// {"error": kind, "message": ...} on `err` and a nonzero exit code.
ExitCode run_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

}  // namespace coherelab
