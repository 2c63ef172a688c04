#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "recipe_rl/grid.hpp"
#include "recipe_rl/predictor.hpp"

namespace recipe_rl {

/// Quantile levels reported by the oracle.
inline constexpr double kReportQuantiles[] = {0.0, 0.001, 0.005, 0.01, 0.05, 0.25, 0.5, 1.0};

/// Grids above this size keep only the quantile summary, not every value.
inline constexpr std::size_t kFullDistributionLimit = 1'000'000;

struct OracleResult {
  GridState optimum;
  StateIndex optimumIndex = 0;
  double optimumObjective = 0.0;
  /// Every objective value in ascending order; empty for grids above
  /// kFullDistributionLimit.
  std::vector<double> distribution;
  /// (level, value) for each of kReportQuantiles.
  std::vector<std::pair<double, double>> quantiles;
  std::size_t evaluationCount = 0;
  double wallSeconds = 0.0;

  /// Nearest-rank quantile: the smallest value v such that at least
  /// ceil(q * n) values are <= v; q = 0 gives the minimum. Needs the full
  /// distribution unless q is one of kReportQuantiles.
  double quantile(double q) const;

  /// Fraction of states with objective strictly below `value`.
  double fractionBelow(double value) const;
};

double nearestRankQuantile(const std::vector<double>& sorted, double q);

/// Evaluates every state once, splitting the index range over `threads`
/// workers (0 = hardware concurrency). Optimum ties go to the lowest index.
OracleResult bruteForce(const ParameterGrid& grid, const Predictor& predictor,
                        const ObjectiveSpec& spec, unsigned threads = 0);

struct SearchResult {
  GridState state;
  double objective = 0.0;
  std::size_t evaluations = 0;
  /// Moves taken (hill climb only).
  std::size_t iterations = 0;
};

enum class Sampling { WithReplacement, WithoutReplacement };

/// `budget` uniform samples of the state space; best one wins, ties to the
/// earliest sample. Without replacement the budget is capped at stateCount.
SearchResult randomSearch(const ParameterGrid& grid, const Predictor& predictor,
                          const ObjectiveSpec& spec, std::size_t budget, std::uint64_t seed,
                          Sampling mode = Sampling::WithReplacement);

/// Steepest descent over the 80 non-hold MDP moves: step to the best
/// in-range neighbour (ties: lowest action index) while it strictly improves.
SearchResult hillClimb(const ParameterGrid& grid, const Predictor& predictor,
                       const ObjectiveSpec& spec, const GridState& start);

}  // namespace recipe_rl
