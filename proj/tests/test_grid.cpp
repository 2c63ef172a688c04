#include <gtest/gtest.h>

#include <fstream>

#include "test_support.hpp"

namespace recipe_rl {
namespace {

GridState levels(std::vector<int> l) { return GridState{std::move(l)}; }

TEST(DefaultGrid, StructuralConstants) {
  const auto grid = defaultOzoneGrid();
  EXPECT_EQ(grid.stateCount(), 36960u);
  EXPECT_EQ(grid.actionCount(), 81u);
  ASSERT_EQ(grid.dimCount(), 4u);
  const std::vector<int> expected{4, 11, 14, 60};
  EXPECT_EQ(std::vector<int>(grid.levelCounts().begin(), grid.levelCounts().end()), expected);
  EXPECT_EQ(grid.dims()[0].name, "C");
  EXPECT_EQ(grid.dims()[3].name, "t");
}

TEST(EncodeState, ExampleIndices) {
  const auto grid = defaultOzoneGrid();
  EXPECT_EQ(grid.encodeState(levels({0, 0, 0, 0})), 0u);
  EXPECT_EQ(grid.encodeState(levels({3, 10, 13, 59})), 36959u);
  // ((2*11 + 6)*14 + 7)*60 + 30
  EXPECT_EQ(grid.encodeState(levels({2, 6, 7, 30})), 23970u);
  const double raw[] = {100, 60, 8, 31};
  EXPECT_EQ(grid.encodeState(grid.stateFromValues(raw)), 23970u);
}

TEST(EncodeState, MatchesLexicographicEnumeration) {
  // Oracle: nested loops in dimension order count states in index order.
  const auto grid = defaultOzoneGrid();
  StateIndex expected = 0;
  for (int c = 0; c < 4; ++c)
    for (int T = 0; T < 11; ++T)
      for (int p = 0; p < 14; ++p)
        for (int t = 0; t < 60; ++t) {
          const auto s = levels({c, T, p, t});
          ASSERT_EQ(grid.encodeState(s), expected);
          ASSERT_EQ(grid.decodeState(expected), s);
          ++expected;
        }
  EXPECT_EQ(expected, grid.stateCount());
}

TEST(DecodeState, Examples) {
  const auto grid = defaultOzoneGrid();
  EXPECT_EQ(grid.decodeState(0), levels({0, 0, 0, 0}));
  EXPECT_EQ(grid.decodeState(36959), levels({3, 10, 13, 59}));
  const auto s = grid.decodeState(23970);
  EXPECT_EQ(grid.rawValues(s), (std::vector<double>{100, 60, 8, 31}));
  EXPECT_EQ(grid.describe(s), "C=100 T=60 pH=8 t=31");
}

TEST(EncodeState, Errors) {
  const auto grid = defaultOzoneGrid();
  EXPECT_THROW(grid.encodeState(levels({4, 0, 0, 0})), InvalidStateError);
  EXPECT_THROW(grid.encodeState(levels({0, -1, 0, 0})), InvalidStateError);
  EXPECT_THROW(grid.encodeState(levels({0, 0, 0})), InvalidStateError);
  EXPECT_THROW(grid.decodeState(36960), InvalidIndexError);
}

TEST(Actions, ExampleIndices) {
  const auto grid = defaultOzoneGrid();
  EXPECT_EQ(grid.encodeAction(std::vector<int>{0, 0, 0, 0}), 40u);
  EXPECT_EQ(grid.encodeAction(std::vector<int>{-1, -1, -1, -1}), 0u);
  EXPECT_EQ(grid.encodeAction(std::vector<int>{1, 1, 1, 1}), 80u);
  EXPECT_EQ(grid.holdAction(), 40u);
  EXPECT_THROW(grid.encodeAction(std::vector<int>{2, 0, 0, 0}), InvalidActionError);
  EXPECT_THROW(grid.encodeAction(std::vector<int>{0, 0, 0}), InvalidActionError);
  EXPECT_THROW(grid.decodeAction(81), InvalidIndexError);
}

TEST(Actions, BijectionAndSingleHold) {
  const auto grid = defaultOzoneGrid();
  ActionIndex expected = 0;
  int holds = 0;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c)
        for (int d = -1; d <= 1; ++d) {
          const MoveAction m{{a, b, c, d}};
          ASSERT_EQ(grid.encodeAction(m), expected);
          ASSERT_EQ(grid.decodeAction(expected), m);
          if (a == 0 && b == 0 && c == 0 && d == 0) {
            ++holds;
            EXPECT_EQ(expected, 40u);
          }
          ++expected;
        }
  EXPECT_EQ(holds, 1);
}

TEST(ApplyAction, Examples) {
  const auto grid = defaultOzoneGrid();
  const auto corner = levels({0, 0, 0, 0});
  auto r = grid.applyAction(corner, grid.decodeAction(0));
  ASSERT_TRUE(std::holds_alternative<OutOfBounds>(r));
  EXPECT_EQ(std::get<OutOfBounds>(r).violationCount, 4);

  const auto mid = grid.decodeState(23970);
  r = grid.applyAction(mid, grid.decodeAction(grid.holdAction()));
  ASSERT_TRUE(std::holds_alternative<InBounds>(r));
  EXPECT_EQ(std::get<InBounds>(r).next, mid);

  r = grid.applyAction(mid, MoveAction{{1, 0, 0, 0}});
  ASSERT_TRUE(std::holds_alternative<InBounds>(r));
  EXPECT_EQ(grid.rawValues(std::get<InBounds>(r).next), (std::vector<double>{150, 60, 8, 31}));
}

TEST(ApplyAction, PartialViolationBlocksWholeMove) {
  const auto grid = defaultOzoneGrid();
  // C at max; increase C and t: only C violates, nothing moves.
  const auto s = levels({3, 5, 5, 5});
  const auto r = grid.applyAction(s, MoveAction{{1, 0, 0, 1}});
  ASSERT_TRUE(std::holds_alternative<OutOfBounds>(r));
  EXPECT_EQ(std::get<OutOfBounds>(r).violationCount, 1);
}

TEST(ApplyAction, ExhaustiveViolationCountAndClosure) {
  // Oracle: decide range membership from raw physical values.
  const auto grid = defaultOzoneGrid();
  std::vector<MoveAction> actions;
  for (ActionIndex a = 0; a < grid.actionCount(); ++a) actions.push_back(grid.decodeAction(a));
  for (StateIndex i = 0; i < grid.stateCount(); ++i) {
    const auto s = grid.decodeState(i);
    const auto raw = grid.rawValues(s);
    for (const auto& m : actions) {
      int expected = 0;
      for (std::size_t d = 0; d < 4; ++d) {
        const auto& dim = grid.dims()[d];
        const double v = raw[d] + m.deltas[d] * dim.step;
        if (v < dim.min || v > dim.max) ++expected;
      }
      const auto r = grid.applyAction(s, m);
      if (expected == 0) {
        ASSERT_TRUE(std::holds_alternative<InBounds>(r));
        ASSERT_TRUE(grid.isValid(std::get<InBounds>(r).next));
      } else {
        ASSERT_TRUE(std::holds_alternative<OutOfBounds>(r));
        ASSERT_EQ(std::get<OutOfBounds>(r).violationCount, expected);
      }
    }
  }
}

TEST(ParameterGrid, GenericDimensionCount) {
  const ParameterGrid g({{"x", 0, 1, 0.5}, {"y", -2, 2, 2}});
  EXPECT_EQ(g.stateCount(), 9u);
  EXPECT_EQ(g.actionCount(), 9u);
  EXPECT_EQ(g.holdAction(), 4u);
  for (StateIndex i = 0; i < g.stateCount(); ++i) EXPECT_EQ(g.encodeState(g.decodeState(i)), i);

  const ParameterGrid single({{"only", 5, 5, 1}});
  EXPECT_EQ(single.stateCount(), 1u);
  EXPECT_EQ(single.actionCount(), 3u);
}

TEST(ParameterGrid, RejectsBadDims) {
  EXPECT_THROW(ParameterGrid({}), InvalidGridError);
  EXPECT_THROW(ParameterGrid({{"x", 0, 10, 0}}), InvalidGridError);
  EXPECT_THROW(ParameterGrid({{"x", 0, 10, -1}}), InvalidGridError);
  EXPECT_THROW(ParameterGrid({{"x", 5, 1, 1}}), InvalidGridError);
  EXPECT_THROW(ParameterGrid({{"x", 0, 10, 3}}), InvalidGridError);
  EXPECT_THROW(ParameterGrid({{"x", 0, 1, 1}, {"x", 0, 1, 1}}), InvalidGridError);
}

TEST(ParameterGrid, StateFromValues) {
  const auto grid = defaultOzoneGrid();
  const double ok[] = {150, 0, 14, 1};
  EXPECT_EQ(grid.stateFromValues(ok), levels({3, 0, 13, 0}));
  const double off[] = {75, 0, 14, 1};
  EXPECT_THROW(grid.stateFromValues(off), InvalidStateError);
  const double outside[] = {0, 0, 15, 1};
  EXPECT_THROW(grid.stateFromValues(outside), InvalidStateError);
}

TEST(GridConfig, JsonRoundTripAndErrors) {
  const auto grid = defaultOzoneGrid();
  EXPECT_EQ(grid.fingerprint(),
            R"([{"name":"C","min":0,"max":150,"step":50},{"name":"T","min":0,"max":100,"step":10},)"
            R"({"name":"pH","min":1,"max":14,"step":1},{"name":"t","min":1,"max":60,"step":1}])");
  EXPECT_EQ(gridFromJson(gridToJson(grid)), grid);
  EXPECT_THROW(gridFromJson("{}"), ParseError);
  EXPECT_THROW(gridFromJson(R"([{"name":"x","min":0,"max":1,"step":1,"unit":"K"}])"), ParseError);
  EXPECT_THROW(gridFromJson(R"([{"name":"x","min":0,"max":1}])"), ParseError);
  EXPECT_THROW(gridFromJson("[not json"), ParseError);

  testing::TempDir dir;
  std::ofstream(dir / "g.json") << R"([{"name":"a","min":0,"max":2,"step":1}])";
  EXPECT_EQ(loadGridFile(dir / "g.json").stateCount(), 3u);
  EXPECT_THROW(loadGridFile(dir / "missing.json"), Error);
}

}  // namespace
}  // namespace recipe_rl
