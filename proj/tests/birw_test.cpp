#include "gacc/birw.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_util.hpp"

namespace gacc {
namespace {

using gacc::testing::key;

// group {0,1} as a clique, outer actors {2,3} joined by an edge, and a single
// inter link 0-2
NetworkSnapshot handTraceSnapshot() {
  return buildSnapshot({key({0, 1}), key({0, 2}), key({2, 3})}, 4);
}

TEST(BuildAlignmentProblem, DegenerateWhenGroupCoversEverything) {
  auto snap = buildSnapshot({key({0, 1})}, 2);
  auto problem = buildAlignmentProblem(snap, key({0, 1}));
  EXPECT_TRUE(problem.degenerate());
  auto result = birwSeq(problem, {});
  EXPECT_EQ(result.r.cols(), 0u);
  auto scores = scoreGroupBRWS(result, problem);
  EXPECT_TRUE(scores.entries.empty());
}

TEST(BuildAlignmentProblem, GroupJFigureLayout) {
  // J = {a,b,c,d}; green inter edges are exactly a-e and b-f
  auto snap = buildSnapshot(
      {key({0, 1, 2, 3}), key({0, 4}), key({1, 5}), key({4, 5})}, 6);
  auto problem = buildAlignmentProblem(snap, key({0, 1, 2, 3}));
  EXPECT_EQ(problem.inter.rows(), 4u);
  EXPECT_EQ(problem.inter.cols(), 2u);
  EXPECT_DOUBLE_EQ(problem.inter.at(0, 0), 1.0);  // a-e
  EXPECT_DOUBLE_EQ(problem.inter.at(1, 1), 1.0);  // b-f
  EXPECT_EQ(problem.inter.nonZeroCount(), 2u);
  // clique side is complete with a zero diagonal
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_DOUBLE_EQ(problem.cliqueAdjacency(i, j), i == j ? 0.0 : 1.0);
    }
  }
  EXPECT_DOUBLE_EQ(problem.outer.at(0, 1), 1.0);  // e-f survives outside
}

TEST(BuildAlignmentProblem, HandExtractionFixture) {
  // adjacency edges 0-2 and 2-3 only; group {0,1}
  auto snap = buildSnapshot({key({0, 2}), key({2, 3})}, 4);
  auto problem = buildAlignmentProblem(snap, key({0, 1}));
  EXPECT_DOUBLE_EQ(problem.inter.at(0, 0), 1.0);
  EXPECT_EQ(problem.inter.nonZeroCount(), 1u);
  EXPECT_EQ(problem.outer.rows(), 2u);
  EXPECT_DOUBLE_EQ(problem.outer.at(0, 1), 1.0);
  EXPECT_EQ(problem.map.toGlobal, (std::vector<ActorIndex>{2, 3}));
}

TEST(BirwSeq, ZeroPriorGivesZeroResult) {
  auto snap = buildSnapshot({key({0, 1}), key({2, 3})}, 4);
  auto problem = buildAlignmentProblem(snap, key({0, 1}));
  ASSERT_EQ(problem.inter.nonZeroCount(), 0u);
  auto result = birwSeq(problem, {0.7, 3, 3});
  for (std::size_t i = 0; i < result.r.rows(); ++i) {
    for (std::size_t j = 0; j < result.r.cols(); ++j) {
      EXPECT_DOUBLE_EQ(result.r(i, j), 0.0);
    }
  }
  auto scores = scoreGroupBRWS(result, problem);
  EXPECT_TRUE(scores.entries.empty());
}

TEST(BirwSeq, AlphaZeroReturnsInterNetwork) {
  auto snap = handTraceSnapshot();
  auto problem = buildAlignmentProblem(snap, key({0, 1}));
  auto result = birwSeq(problem, {0.0, 4, 4});
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_DOUBLE_EQ(result.r(i, j), problem.inter.at(i, j));
    }
  }
}

TEST(BirwSeq, HandTraceSingleStep) {
  auto snap = handTraceSnapshot();
  auto problem = buildAlignmentProblem(snap, key({0, 1}));
  auto result = birwSeq(problem, {0.5, 1, 1});
  EXPECT_NEAR(result.r(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(result.r(0, 1), 0.25, 1e-12);
  EXPECT_NEAR(result.r(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(result.r(1, 1), 0.25, 1e-12);
  auto scores = scoreGroupBRWS(result, problem);
  EXPECT_NEAR(scores.scoreOf(2), 0.25, 1e-12);
  EXPECT_NEAR(scores.scoreOf(3), 0.25, 1e-12);
}

TEST(BirwSeq, SingletonGroupKeepsOnlyPriorOnGroupSide) {
  // A edges 0-1, 0-2, 2-3; group {0}: X = [1,1,0], sum 2, R0 = [0.5,0.5,0].
  // c=1 makes the clique side a 1x1 zero, so the group step yields 0.5*X and
  // the outer step gives [0.5, 0.5, 0.25] by hand.
  auto snap = handTraceSnapshot();
  auto problem = buildAlignmentProblem(snap, key({0}));
  ASSERT_EQ(problem.cliqueAdjacency.rows(), 1u);
  EXPECT_DOUBLE_EQ(problem.cliqueAdjacency(0, 0), 0.0);
  auto result = birwSeq(problem, {0.5, 1, 1});
  EXPECT_NEAR(result.r(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(result.r(0, 1), 0.5, 1e-12);
  EXPECT_NEAR(result.r(0, 2), 0.25, 1e-12);
  // scores of a singleton group equal the single row of R
  auto scores = scoreGroupBRWS(result, problem);
  EXPECT_NEAR(scores.scoreOf(1), 0.5, 1e-12);
  EXPECT_NEAR(scores.scoreOf(2), 0.5, 1e-12);
  EXPECT_NEAR(scores.scoreOf(3), 0.25, 1e-12);
}

// literal re-execution of the recursion with plain loops
DenseMatrix naiveBirw(const AlignmentProblem& p, const BirwParams& params) {
  const std::size_t c = p.group.size();
  const std::size_t o = p.outer.rows();
  std::vector<std::vector<double>> x(c, std::vector<double>(o, 0.0));
  double total = 0.0;
  p.inter.forEach([&](std::uint32_t i, std::uint32_t j, double v) {
    x[i][j] = v;
    total += v;
  });
  std::vector<std::vector<double>> r = x;
  if (total != 0.0) {
    for (auto& row : r) {
      for (double& v : row) v /= total;
    }
  } else {
    for (auto& row : r) std::fill(row.begin(), row.end(), 0.0);
  }
  for (std::size_t t = 1; t <= std::max(params.lGroup, params.lOuter); ++t) {
    if (t <= params.lGroup) {
      std::vector<std::vector<double>> next(c, std::vector<double>(o, 0.0));
      for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t k = 0; k < c; ++k) {
          if (i == k) continue;  // clique has a zero diagonal
          for (std::size_t j = 0; j < o; ++j) next[i][j] += r[k][j];
        }
      }
      for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < o; ++j) {
          next[i][j] = params.alpha * next[i][j] +
                       (1.0 - params.alpha) * x[i][j];
        }
      }
      r = std::move(next);
    }
    if (t <= params.lOuter) {
      std::vector<std::vector<double>> next(c, std::vector<double>(o, 0.0));
      for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t u = 0; u < o; ++u) {
          for (std::size_t v = 0; v < o; ++v) {
            next[i][v] += r[i][u] * p.outer.at(static_cast<std::uint32_t>(u),
                                               static_cast<std::uint32_t>(v));
          }
        }
      }
      for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < o; ++j) {
          next[i][j] = params.alpha * next[i][j] +
                       (1.0 - params.alpha) * x[i][j];
        }
      }
      r = std::move(next);
    }
  }
  DenseMatrix out(c, o);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < o; ++j) out(i, j) = r[i][j];
  }
  return out;
}

TEST(BirwSeq, MatchesNaiveLoopOnSmallFixtures) {
  std::mt19937 rng(61);
  for (int trial = 0; trial < 15; ++trial) {
    auto snap = gacc::testing::randomSnapshot(8, 6, rng);
    for (const GroupKey& group : snap.groups) {
      if (group.size() >= snap.n) continue;
      auto problem = buildAlignmentProblem(snap, group);
      for (auto [lg, lo] : {std::pair<std::size_t, std::size_t>{1, 1},
                            {2, 1},
                            {1, 3},
                            {4, 4}}) {
        BirwParams params{0.6, lg, lo};
        auto fast = birwSeq(problem, params);
        auto slow = naiveBirw(problem, params);
        ASSERT_LE(fast.r.maxAbsDiff(slow), 1e-12);
      }
    }
  }
}

TEST(BirwSeq, PerRowNormalizationScalesRowsIndependently) {
  // X = [[1,0],[0,0]]: under per-row normalization the linked member's row
  // becomes [1,0] while the unlinked member keeps a zero row; with lg=lo=1
  // the hand trace from R0=[[1,0],[0,0]] is unchanged except R0 itself
  auto snap = handTraceSnapshot();
  auto problem = buildAlignmentProblem(snap, key({0, 1}));
  BirwParams perRow{0.5, 1, 1, BirwNormalization::perRow};
  auto result = birwSeq(problem, perRow);
  EXPECT_NEAR(result.r(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(result.r(0, 1), 0.25, 1e-12);
  EXPECT_NEAR(result.r(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(result.r(1, 1), 0.25, 1e-12);

  // a two-link prior separates the conventions: grand total divides by 2,
  // per-row leaves each singleton row at 1
  auto snap2 = buildSnapshot(
      {key({0, 1}), key({0, 2}), key({1, 3}), key({2, 3})}, 4);
  auto problem2 = buildAlignmentProblem(snap2, key({0, 1}));
  BirwParams grand{0.5, 1, 1, BirwNormalization::grandTotal};
  BirwParams rows{0.5, 1, 1, BirwNormalization::perRow};
  auto rGrand = birwSeq(problem2, grand);
  auto rRows = birwSeq(problem2, rows);
  // both start from X scaled differently, so results differ by design
  EXPECT_GT(rRows.r.maxAbsDiff(rGrand.r), 1e-6);
}

TEST(BirwSeq, MemberOrderIrrelevantToScores) {
  auto snap = handTraceSnapshot();
  auto problem = buildAlignmentProblem(snap, GroupKey::of({1, 0}));
  auto canonical = buildAlignmentProblem(snap, key({0, 1}));
  auto a = scoreGroupBRWS(birwSeq(problem, {}), problem);
  auto b = scoreGroupBRWS(birwSeq(canonical, {}), canonical);
  EXPECT_EQ(a.entries, b.entries);
}

TEST(BirwSeq, NonNegativeResults) {
  std::mt19937 rng(67);
  for (int trial = 0; trial < 10; ++trial) {
    auto snap = gacc::testing::randomSnapshot(10, 7, rng);
    for (const GroupKey& group : snap.groups) {
      if (group.size() >= snap.n) continue;
      auto problem = buildAlignmentProblem(snap, group);
      auto result = birwSeq(problem, {});
      for (std::size_t i = 0; i < result.r.rows(); ++i) {
        for (std::size_t j = 0; j < result.r.cols(); ++j) {
          EXPECT_GE(result.r(i, j), 0.0);
        }
      }
    }
  }
}

TEST(BirwSeq, SuccessiveDifferencesShrinkOnContractiveFixture) {
  // c=2 clique and single-edge outer both have unit infinity norm, so with
  // alpha=0.5 each extra step contracts by 0.25 and iterates approach a
  // fixed point
  auto snap = handTraceSnapshot();
  auto problem = buildAlignmentProblem(snap, key({0, 1}));
  double previousDiff = 0.0;
  DenseMatrix previous;
  for (std::size_t steps = 1; steps <= 8; ++steps) {
    auto result = birwSeq(problem, {0.5, steps, steps});
    if (steps >= 2) {
      const double diff = result.r.maxAbsDiff(previous);
      if (steps >= 4) {
        EXPECT_LE(diff, previousDiff + 1e-12) << "step " << steps;
      }
      previousDiff = diff;
    }
    previous = std::move(result.r);
  }
}

TEST(BirwParams, Validation) {
  BirwParams bad;
  bad.alpha = 1.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  BirwParams zeroLength;
  zeroLength.lGroup = 0;
  EXPECT_THROW(zeroLength.validate(), std::invalid_argument);
  BirwParams alphaZero;
  alphaZero.alpha = 0.0;
  EXPECT_NO_THROW(alphaZero.validate());
}

}  // namespace
}  // namespace gacc
