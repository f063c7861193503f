#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "keyflow/observation.hpp"

namespace keyflow {
namespace {

std::vector<BoundingBox> still_gt(int frames, BoundingBox b) { return std::vector<BoundingBox>(frames, b); }

TEST(SyntheticScorer, PerfectOverlapScoresScale) {
  const BoundingBox gt{10, 10, 20, 20};
  SyntheticScorer s(still_gt(5, gt), {}, {30.0, 0.0, 0.0}, 1);
  EXPECT_DOUBLE_EQ(s.score(3, gt), 30.0);
}

TEST(SyntheticScorer, DisjointScoresZero) {
  SyntheticScorer s(still_gt(5, {10, 10, 20, 20}), {}, {30.0, 0.0, 0.0}, 1);
  EXPECT_EQ(s.score(1, {100, 100, 5, 5}), 0.0);
}

TEST(SyntheticScorer, WindowPenaltyApplies) {
  const BoundingBox gt{10, 10, 20, 20};
  SyntheticScorer s(still_gt(10, gt), {{4, 6, 25.0, 1.0}}, {30.0, 0.0, 0.0}, 1);
  EXPECT_DOUBLE_EQ(s.score(5, gt), 5.0);
  EXPECT_DOUBLE_EQ(s.score(4, gt), 5.0);
  EXPECT_DOUBLE_EQ(s.score(7, gt), 30.0);
}

TEST(SyntheticScorer, OutOfRangeFrame) {
  SyntheticScorer s(still_gt(3, {0, 0, 1, 1}), {}, {}, 0);
  EXPECT_THROW(s.score(0, {0, 0, 1, 1}), SequenceError);
  EXPECT_THROW(s.score(4, {0, 0, 1, 1}), SequenceError);
}

TEST(SyntheticScorer, RejectsInvalidSetup) {
  EXPECT_THROW(SyntheticScorer(still_gt(3, {0, 0, 1, 1}), {}, {0.0, 0.0, 0.0}, 0), ConfigError);
  EXPECT_THROW(SyntheticScorer(still_gt(3, {0, 0, 1, 1}), {{2, 5, 1.0, 1.0}}, {}, 0), ConfigError);
  EXPECT_THROW(SyntheticScorer(still_gt(3, {0, 0, 1, 1}), {{1, 2, -1.0, 1.0}}, {}, 0), ConfigError);
}

TEST(SyntheticScorer, NoiseIsKeyedAndDeterministic) {
  const BoundingBox gt{10, 10, 20, 20};
  SyntheticScorer a(still_gt(5, gt), {}, {30.0, 2.0, 0.0}, 42);
  SyntheticScorer b(still_gt(5, gt), {}, {30.0, 2.0, 0.0}, 42);
  const BoundingBox c{12, 11, 20, 21};
  const double first = a.score(2, c);
  (void)a.score(3, gt);
  EXPECT_EQ(a.score(2, c), first);
  EXPECT_EQ(b.score(2, c), first);
  EXPECT_NE(a.score(2, {12, 11, 20, 22}), first);
}

TEST(SyntheticScorer, NoiseHasConfiguredSpread) {
  const BoundingBox gt{10, 10, 20, 20};
  SyntheticScorer s(still_gt(1, gt), {}, {30.0, 2.0, 0.0}, 3);
  double sum = 0, sum_sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double e = s.score(1, {100.0 + i, 0, 1, 1});  // disjoint: pure noise
    sum += e;
    sum_sq += e * e;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.05);
  EXPECT_NEAR(std::sqrt(sum_sq / n), 2.0, 0.05);
}

TEST(SyntheticScorer, UpdateIsLogged) {
  SyntheticScorer s(still_gt(3, {0, 0, 1, 1}), {}, {}, 0);
  s.update(2, {1, 2, 3, 4});
  ASSERT_EQ(s.update_log().size(), 1u);
  EXPECT_EQ(s.update_log()[0].frame, 2);
  EXPECT_EQ(s.update_log()[0].box, (BoundingBox{1, 2, 3, 4}));
}

TEST(SelectBest, Singleton) {
  const std::vector<ScoredCandidate> v{{{1, 2, 3, 4}, -7.0}};
  const Selection s = select_best(v);
  EXPECT_EQ(s.index, 0u);
  EXPECT_EQ(s.box, (BoundingBox{1, 2, 3, 4}));
}

TEST(SelectBest, TieGoesToLowestIndex) {
  std::vector<ScoredCandidate> v;
  for (double s : {3.0, 9.0, 9.0, 1.0}) v.push_back({{s, 0, 1, 1}, s});
  EXPECT_EQ(select_best(v).index, 1u);
}

TEST(SelectBest, EmptyIsInternalError) { EXPECT_THROW(select_best({}), InternalError); }

TEST(SelectBest, MatchesExhaustiveScan) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> len(1, 40), val(-5, 5);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<ScoredCandidate> v;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) v.push_back({{double(i), 0, 1, 1}, double(val(rng))});
    // oracle: first index whose score is >= every score
    std::size_t expect = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      bool dominates = true;
      for (const auto& o : v) dominates = dominates && v[i].score >= o.score;
      if (dominates) {
        expect = i;
        break;
      }
    }
    const Selection got = select_best(v);
    ASSERT_EQ(got.index, expect);
    for (const auto& o : v) EXPECT_GE(got.score, o.score);

    // strictly increasing transform leaves the choice alone
    std::vector<ScoredCandidate> w = v;
    for (auto& c : w) c.score = std::exp(0.3 * c.score) + 2.0;
    EXPECT_EQ(select_best(w).index, got.index);
  }
}

TEST(SelectBest, NoiselessScorerPicksGroundTruthAnchor) {
  const BoundingBox gt{40, 40, 30, 30};
  SyntheticScorer s(still_gt(2, gt), {}, {30.0, 0.0, 0.0}, 1);
  std::vector<ScoredCandidate> v{{gt, s.score(1, gt)}};
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 5);
  for (int i = 0; i < 255; ++i) {
    const BoundingBox c{gt.x + n(rng), gt.y + n(rng), gt.w, gt.h};
    v.push_back({c, s.score(1, c)});
  }
  EXPECT_EQ(select_best(v).box, gt);
}

}  // namespace
}  // namespace keyflow
