#pragma once

#include <vector>

#include "recipe_rl/grid.hpp"
#include "recipe_rl/predictor.hpp"
#include "recipe_rl/rng.hpp"

namespace recipe_rl {

struct StepOutcome {
  GridState nextState;
  double reward = 0.0;
  /// The move left the parameter ranges; nextState is the input state.
  bool blocked = false;
  /// Objective at nextState.
  double objectiveAfter = 0.0;
};

/// The recipe MDP. A step to an in-range state earns f(s) - f(s'), so an
/// objective decrease is a positive reward; a step that would leave the
/// ranges in x dimensions is rejected and earns -x. There is no terminal
/// state.
///
/// Objective values are memoized per state index. The memo makes an
/// Environment single-threaded; give each concurrent run its own copy.
class Environment {
 public:
  Environment(ParameterGrid grid, PredictorSource predictor, ObjectiveSpec spec,
              bool memoize = true);

  const ParameterGrid& grid() const noexcept { return grid_; }
  const Predictor& predictor() const noexcept { return *predictor_; }
  const PredictorSource& predictorSource() const noexcept { return predictor_; }
  const ObjectiveSpec& objectiveSpec() const noexcept { return spec_; }

  double objectiveAt(const GridState& state);
  double objectiveAt(StateIndex index);

  StepOutcome step(const GridState& state, const MoveAction& action);

  /// One uniform level per dimension, drawn in dimension order.
  GridState randomInitialState(Rng& rng) const;

  /// Number of predictor calls made so far.
  std::size_t predictorCalls() const noexcept { return predictorCalls_; }

 private:
  ParameterGrid grid_;
  PredictorSource predictor_;
  ObjectiveSpec spec_;
  bool memoize_;
  std::vector<double> memo_;  // NaN = not yet computed
  std::size_t predictorCalls_ = 0;
};

}  // namespace recipe_rl
