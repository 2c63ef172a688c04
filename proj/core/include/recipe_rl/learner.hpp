#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "recipe_rl/env.hpp"
#include "recipe_rl/grid.hpp"
#include "recipe_rl/rng.hpp"

namespace recipe_rl {

struct Hyperparameters {
  int episodes = 100;
  int stepsPerEpisode = 1000;
  double learningRate = 0.05;
  double discount = 0.8;
  /// Probability of taking the uniformly random branch.
  double epsilon = 0.88;
  std::uint64_t seed = 0;

  /// Throws Error unless episodes and steps are positive and the three rates
  /// lie in [0, 1].
  void validate() const;

  bool operator==(const Hyperparameters&) const = default;
};

/// Dense state x action table of Q-values, zero-initialized, tagged with the
/// fingerprint of the grid it was built for.
class QTable {
 public:
  explicit QTable(const ParameterGrid& grid);
  QTable(std::string fingerprint, std::size_t stateCount, std::size_t actionCount);

  std::size_t stateCount() const noexcept { return stateCount_; }
  std::size_t actionCount() const noexcept { return actionCount_; }
  const std::string& fingerprint() const noexcept { return fingerprint_; }

  double at(StateIndex s, ActionIndex a) const { return values_[s * actionCount_ + a]; }
  double& at(StateIndex s, ActionIndex a) { return values_[s * actionCount_ + a]; }

  std::span<const double> row(StateIndex s) const {
    return {values_.data() + s * actionCount_, actionCount_};
  }
  std::span<double> row(StateIndex s) { return {values_.data() + s * actionCount_, actionCount_}; }

  double rowMax(StateIndex s) const;

  /// All entries finite.
  bool allFinite() const;

  bool operator==(const QTable& other) const = default;

 private:
  std::string fingerprint_;
  std::size_t stateCount_;
  std::size_t actionCount_;
  std::vector<double> values_;
};

/// Argmax of the state's row; ties go to the lowest action index.
ActionIndex greedyAction(const QTable& table, StateIndex state);

/// Epsilon-greedy: draws one coin; if it lands below epsilon, draws a uniform
/// action over the whole action space (hold and out-of-range moves included),
/// otherwise returns greedyAction without further draws.
ActionIndex selectAction(const QTable& table, StateIndex state, double epsilon, Rng& rng);

/// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)), the max taken
/// over the full row of s'. Throws TrainingError if the result is not finite.
void updateQ(QTable& table, StateIndex s, ActionIndex a, double reward, StateIndex next,
             double alpha, double gamma);

struct EpisodeRecord {
  int episode = 0;  // 1-based
  double bestObjective = 0.0;
  double rewardSum = 0.0;
  int blockedSteps = 0;

  bool operator==(const EpisodeRecord&) const = default;
};

struct TrainingReport {
  GridState bestState;
  double bestObjective = 0.0;
  /// Endpoint of the greedy rollout from bestState; filled by
  /// extractRecommendation.
  GridState greedyState;
  double greedyObjective = 0.0;
  std::vector<EpisodeRecord> curve;
  Hyperparameters hyperparameters;
  std::uint64_t totalSteps = 0;
  double wallSeconds = 0.0;
};

struct TrainingResult {
  QTable table;
  TrainingReport report;
};

/// Runs Q-learning on `env`. One Rng seeded from `hp.seed` drives everything,
/// consumed in this order: per episode, one draw per dimension for the
/// initial state; then per step, the epsilon coin and, on the random branch,
/// one action draw.
///
/// The best state is the lowest-objective state ever occupied, initial
/// states included (ties: lowest state index). With zero episodes the report
/// holds the first initial state the seed would produce.
///
/// Episodes and steps may be zero here; Hyperparameters::validate is the
/// user-facing check.
TrainingResult train(Environment& env, const Hyperparameters& hp);

/// Returns report.bestState. Also walks the greedy policy from bestState
/// until a state repeats or 2 * stepsPerEpisode moves elapse, storing the end
/// point in report.greedyState.
GridState extractRecommendation(const QTable& table, Environment& env, TrainingReport& report);

/// Text format: line 1 grid fingerprint JSON, line 2 hyperparameters JSON,
/// then `stateIndex,q0,...,q{A-1}` rows in round-trip precision.
void saveQTable(const QTable& table, const Hyperparameters& hp,
                const std::filesystem::path& path);

/// Rejects a file whose fingerprint differs from `grid`'s, naming both.
QTable loadQTable(const std::filesystem::path& path, const ParameterGrid& grid);

/// Hyperparameters as compact JSON (keys: episodes, steps, alpha, gamma,
/// epsilon, seed).
std::string hyperparametersToJson(const Hyperparameters& hp);

}  // namespace recipe_rl
