#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "recipe_rl/error.hpp"
#include "recipe_rl/learner.hpp"
#include "recipe_rl/oracle.hpp"
#include "recipe_rl/predictor.hpp"

namespace recipe_rl::cli {

enum class Command { Train, Oracle, RandomSearch, HillClimb, Recommend };

std::string commandName(Command c);

/// Bad flag or config-file field. exitCode() is 0 for --help.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int exitCode = 2) : Error(what), exitCode_(exitCode) {}
  int exitCode() const noexcept { return exitCode_; }

 private:
  int exitCode_;
};

struct SeedRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;
};

struct RunConfig {
  Command command = Command::Train;
  std::optional<std::filesystem::path> configFile;
  std::optional<std::filesystem::path> gridPath;
  /// "reference" or "table:<path>".
  std::string predictor = "reference";
  ColorQuad target;
  std::array<double, 4> weights{1.0, 1.0, 1.0, 1.0};
  Hyperparameters hyperparameters;
  std::optional<SeedRange> seeds;
  std::optional<std::filesystem::path> reportPath;
  std::optional<std::filesystem::path> curvePath;
  std::optional<std::filesystem::path> qtablePath;
  /// random-search
  std::size_t budget = 100000;
  Sampling sampling = Sampling::WithReplacement;
  /// hill-climb start as raw values; a seeded random state when absent.
  std::optional<std::vector<double>> start;
  /// Worker threads for the oracle and seed sweeps; 0 = hardware concurrency.
  unsigned threads = 0;
};

/// Resolves flags over an optional --config JSON file over built-in
/// defaults. Throws ConfigError naming the offending flag or field.
RunConfig parseConfig(const std::vector<std::string>& args);

/// The fully resolved configuration as JSON text, embedded in every report.
std::string configToJson(const RunConfig& config);

/// Executes the command. Returns the process exit status; every requested
/// output file is either written completely or not at all.
int runCommand(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses "a,b,c,d" into four finite reals.
std::array<double, 4> parseQuad(const std::string& text, const std::string& what);

/// Drops the top-level "wall_time_seconds" field so reports can be compared.
std::string stripWallTime(const std::string& reportJson);

}  // namespace recipe_rl::cli
