#include <gtest/gtest.h>

#include <algorithm>

#include "test_support.hpp"

namespace recipe_rl {
namespace {

TEST(BruteForce, FixtureBRecoversTargetState) {
  const auto grid = defaultOzoneGrid();
  const ReferenceSurrogate model;
  const auto o = bruteForce(grid, model, testing::fixtureBSpec(grid));
  EXPECT_EQ(o.optimum, testing::fixtureBState(grid));
  EXPECT_EQ(o.optimumIndex, 23970u);
  EXPECT_LE(o.optimumObjective, 1e-9);
  EXPECT_EQ(o.evaluationCount, 36960u);
  ASSERT_EQ(o.distribution.size(), 36960u);
  EXPECT_EQ(o.distribution.front(), o.optimumObjective);
  EXPECT_TRUE(std::is_sorted(o.distribution.begin(), o.distribution.end()));
}

TEST(BruteForce, FixtureAOptimumIsMaximalFadingCorner) {
  // Frozen from an independent exhaustive evaluation of the surrogate.
  const auto grid = defaultOzoneGrid();
  const auto o = bruteForce(grid, ReferenceSurrogate{}, testing::fixtureASpec());
  EXPECT_EQ(grid.describe(o.optimum), "C=100 T=100 pH=8 t=60");
  EXPECT_NEAR(o.optimumObjective, 5.876893328264197, 1e-9);
}

TEST(BruteForce, ConstantPredictorTiesToIndexZero) {
  const auto grid = defaultOzoneGrid();
  const auto constant = makeConstantPredictor(grid, {1, 2, 3, 4});
  const auto o = bruteForce(grid, *constant, testing::fixtureASpec());
  EXPECT_EQ(o.optimumIndex, 0u);
  EXPECT_EQ(o.distribution.front(), o.distribution.back());
}

TEST(BruteForce, ThreadCountDoesNotChangeResult) {
  const auto grid = defaultOzoneGrid();
  const ReferenceSurrogate model;
  const auto one = bruteForce(grid, model, testing::fixtureASpec(), 1);
  const auto four = bruteForce(grid, model, testing::fixtureASpec(), 4);
  EXPECT_EQ(one.optimumIndex, four.optimumIndex);
  EXPECT_EQ(one.distribution, four.distribution);
}

TEST(BruteForce, PropagatesPredictorErrors) {
  const auto grid = defaultOzoneGrid();
  std::vector<std::optional<ColorQuad>> rows(grid.stateCount(), ColorQuad{});
  rows[30000].reset();
  const TablePredictor table(grid, rows);
  EXPECT_THROW(bruteForce(grid, table, testing::fixtureASpec(), 3), IncompleteTableError);
}

TEST(Quantiles, NearestRankAndMonotone) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(nearestRankQuantile(v, 0.0), 1);
  EXPECT_EQ(nearestRankQuantile(v, 0.1), 1);
  EXPECT_EQ(nearestRankQuantile(v, 0.11), 2);
  EXPECT_EQ(nearestRankQuantile(v, 0.5), 5);
  EXPECT_EQ(nearestRankQuantile(v, 1.0), 10);

  const auto grid = defaultOzoneGrid();
  const auto o = bruteForce(grid, ReferenceSurrogate{}, testing::fixtureASpec());
  ASSERT_EQ(o.quantiles.size(), std::size(kReportQuantiles));
  for (std::size_t i = 1; i < o.quantiles.size(); ++i) {
    EXPECT_LE(o.quantiles[i - 1].second, o.quantiles[i].second);
  }
  EXPECT_EQ(o.quantiles.front().second, o.optimumObjective);
  EXPECT_EQ(o.quantiles.back().second, o.distribution.back());
  // ceil(0.005 * 36960) = 185 -> 185th smallest value.
  EXPECT_EQ(o.quantile(0.005), o.distribution[184]);
  EXPECT_EQ(o.fractionBelow(o.optimumObjective), 0.0);
}

TEST(RandomSearch, ExhaustiveWithoutReplacementMatchesBruteForce) {
  const auto grid = defaultOzoneGrid();
  const ReferenceSurrogate model;
  const auto spec = testing::fixtureASpec();
  const auto o = bruteForce(grid, model, spec);
  const auto r = randomSearch(grid, model, spec, grid.stateCount(), 1, Sampling::WithoutReplacement);
  EXPECT_EQ(r.objective, o.optimumObjective);
  EXPECT_EQ(r.evaluations, grid.stateCount());
  // Budget is capped at the state count.
  EXPECT_EQ(randomSearch(grid, model, spec, 10 * grid.stateCount(), 1,
                         Sampling::WithoutReplacement).evaluations,
            grid.stateCount());
}

TEST(RandomSearch, BudgetOneIsThatSample) {
  const auto grid = defaultOzoneGrid();
  const ReferenceSurrogate model;
  const auto spec = testing::fixtureASpec();
  const auto r = randomSearch(grid, model, spec, 1, 77);
  Rng rng(77);
  const auto expected = grid.decodeState(rng.below(grid.stateCount()));
  EXPECT_EQ(r.state, expected);
  EXPECT_EQ(r.objective, evaluate(model, spec, grid, expected));
  EXPECT_THROW(randomSearch(grid, model, spec, 0, 1), Error);
}

TEST(RandomSearch, LargerBudgetNeverWorseAndDeterministic) {
  const auto grid = defaultOzoneGrid();
  const ReferenceSurrogate model;
  const auto spec = testing::fixtureBSpec(grid);
  for (auto mode : {Sampling::WithReplacement, Sampling::WithoutReplacement}) {
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t b : {1u, 10u, 100u, 1000u, 10000u}) {
      const auto r = randomSearch(grid, model, spec, b, 3, mode);
      EXPECT_LE(r.objective, previous);
      previous = r.objective;
      EXPECT_EQ(r.objective, randomSearch(grid, model, spec, b, 3, mode).objective);
    }
  }
  const auto o = bruteForce(grid, model, spec);
  EXPECT_GE(randomSearch(grid, model, spec, 100000, 5).objective, o.optimumObjective);
}

TEST(HillClimb, GlobalOptimumIsFixedPoint) {
  const auto grid = defaultOzoneGrid();
  const ReferenceSurrogate model;
  const auto spec = testing::fixtureBSpec(grid);
  const auto r = hillClimb(grid, model, spec, testing::fixtureBState(grid));
  EXPECT_EQ(r.state, testing::fixtureBState(grid));
  EXPECT_EQ(r.iterations, 0u);
}

TEST(HillClimb, DescendsFromCorner) {
  const auto grid = defaultOzoneGrid();
  const ReferenceSurrogate model;
  const auto spec = testing::fixtureBSpec(grid);
  const auto start = grid.decodeState(0);
  const auto r = hillClimb(grid, model, spec, start);
  EXPECT_LE(r.objective, evaluate(model, spec, grid, start));
  EXPECT_LE(r.iterations, grid.stateCount());
  EXPECT_EQ(r.objective, evaluate(model, spec, grid, r.state));
  // Local minimum: no in-range neighbour is strictly better.
  for (ActionIndex a = 0; a < grid.actionCount(); ++a) {
    auto moved = grid.applyAction(r.state, grid.decodeAction(a));
    if (auto* in = std::get_if<InBounds>(&moved)) {
      EXPECT_GE(evaluate(model, spec, grid, in->next), r.objective);
    }
  }
}

TEST(HillClimb, DescentPropertyFromRandomStarts) {
  const auto grid = defaultOzoneGrid();
  const ReferenceSurrogate model;
  const auto spec = testing::fixtureASpec();
  const auto o = bruteForce(grid, model, spec);
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    const auto start = grid.decodeState(rng.below(grid.stateCount()));
    const auto r = hillClimb(grid, model, spec, start);
    EXPECT_LE(r.objective, evaluate(model, spec, grid, start));
    EXPECT_GE(r.objective, o.optimumObjective);
  }
  EXPECT_THROW(hillClimb(grid, model, spec, GridState{{9, 0, 0, 0}}), InvalidStateError);
}

}  // namespace
}  // namespace recipe_rl
