#include "recipe_rl/env.hpp"

#include <cmath>
#include <limits>

#include "recipe_rl/error.hpp"

namespace recipe_rl {

Environment::Environment(ParameterGrid grid, PredictorSource predictor, ObjectiveSpec spec,
                         bool memoize)
    : grid_(std::move(grid)),
      predictor_(std::move(predictor)),
      spec_(spec),
      memoize_(memoize) {
  if (!predictor_) throw Error("environment needs a predictor");
  spec_.validate();
  if (memoize_) memo_.assign(grid_.stateCount(), std::numeric_limits<double>::quiet_NaN());
}

double Environment::objectiveAt(const GridState& state) {
  const StateIndex idx = grid_.encodeState(state);
  if (memoize_ && !std::isnan(memo_[idx])) return memo_[idx];
  ++predictorCalls_;
  const double f = evaluate(*predictor_, spec_, grid_, state);
  if (memoize_) memo_[idx] = f;
  return f;
}

double Environment::objectiveAt(StateIndex index) {
  if (memoize_ && index < memo_.size() && !std::isnan(memo_[index])) return memo_[index];
  return objectiveAt(grid_.decodeState(index));
}

StepOutcome Environment::step(const GridState& state, const MoveAction& action) {
  auto moved = grid_.applyAction(state, action);
  const double before = objectiveAt(state);
  if (auto* out = std::get_if<OutOfBounds>(&moved)) {
    return {state, -static_cast<double>(out->violationCount), true, before};
  }
  auto& next = std::get<InBounds>(moved).next;
  const double after = objectiveAt(next);
  return {std::move(next), before - after, false, after};
}

GridState Environment::randomInitialState(Rng& rng) const {
  GridState s;
  s.levels.resize(grid_.dimCount());
  for (std::size_t i = 0; i < grid_.dimCount(); ++i) {
    s.levels[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(grid_.levelCount(i))));
  }
  return s;
}

}  // namespace recipe_rl
