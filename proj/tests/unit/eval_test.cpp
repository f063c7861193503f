#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "keyflow/eval.hpp"
#include "test_support.hpp"

namespace keyflow {
namespace {

std::vector<BoundingBox> shifted(const std::vector<BoundingBox>& gt, double dx) {
  auto out = gt;
  for (auto& b : out) b.x += dx;
  return out;
}

const std::vector<BoundingBox> kGt(10, BoundingBox{100, 100, 50, 50});

TEST(Precision, PerfectTrace) {
  const auto p = precision_curve(kGt, kGt);
  ASSERT_EQ(p.curve.size(), 51u);
  for (double v : p.curve) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(p.at_20, 1.0);
}

TEST(Precision, ConstantOffset) {
  const auto p = precision_curve(shifted(kGt, 25), kGt);
  EXPECT_EQ(p.at_20, 0.0);
  EXPECT_EQ(p.curve[24], 0.0);
  EXPECT_EQ(p.curve[25], 1.0);  // inclusive
}

TEST(Precision, HalfNearHalfFar) {
  std::vector<BoundingBox> tr = kGt;
  for (std::size_t i = 0; i < tr.size(); ++i) tr[i].x += i < 5 ? 5.0 : 500.0;
  const auto p = precision_curve(tr, kGt);
  EXPECT_EQ(p.at_20, 0.5);
  EXPECT_EQ(p.curve[4], 0.0);
  EXPECT_EQ(p.curve[50], 0.5);
}

TEST(Success, PerfectIsTwentyOfTwentyOne) {
  const auto s = success_auc(kGt, kGt);
  ASSERT_EQ(s.curve.size(), 21u);
  EXPECT_EQ(s.curve[20], 0.0);  // iou > 1 never holds
  EXPECT_NEAR(s.auc, 20.0 / 21.0, 1e-12);
}

TEST(Success, DisjointIsZero) {
  EXPECT_EQ(success_auc(shifted(kGt, 500), kGt).auc, 0.0);
}

TEST(Success, HalfPerfectHalfDisjoint) {
  std::vector<BoundingBox> tr = kGt;
  for (std::size_t i = 5; i < tr.size(); ++i) tr[i].x += 500;
  EXPECT_NEAR(success_auc(tr, kGt).auc, 10.0 / 21.0, 1e-12);
}

TEST(Success, HalfOverlapExactly) {
  const std::vector<BoundingBox> gt(6, BoundingBox{0, 0, 30, 10});
  const std::vector<BoundingBox> tr(6, BoundingBox{0, 0, 15, 10});
  const auto s = success_auc(tr, gt);
  for (int j = 0; j <= 20; ++j) EXPECT_EQ(s.curve[static_cast<std::size_t>(j)], j < 10 ? 1.0 : 0.0) << j;
  EXPECT_NEAR(s.auc, 10.0 / 21.0, 1e-12);
}

TEST(Success, KnownOverlap) {
  // shift by w/2 → iou = 1/3; counted at 0, .05, ..., .30 → 7 thresholds
  const auto s = success_auc(shifted(kGt, 25), kGt);
  EXPECT_NEAR(s.auc, 7.0 / 21.0, 1e-12);
}

TEST(Metrics, CurvesMonotoneOnRandomTraces) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<BoundingBox> tr, gt;
    for (int i = 0; i < 8; ++i) {
      gt.push_back(testing::random_box(rng, 200.0));
      tr.push_back(testing::random_box(rng, 200.0));
    }
    const auto p = precision_curve(tr, gt);
    const auto s = success_auc(tr, gt);
    for (std::size_t i = 1; i < p.curve.size(); ++i) ASSERT_GE(p.curve[i], p.curve[i - 1]);
    for (std::size_t i = 1; i < s.curve.size(); ++i) ASSERT_LE(s.curve[i], s.curve[i - 1]);
    ASSERT_GE(s.auc, 0.0);
    ASSERT_LE(s.auc, 1.0);
  }
}

TEST(Metrics, LengthMismatchRaises) {
  const std::vector<BoundingBox> shorter(9, kGt[0]);
  EXPECT_THROW(precision_curve(shorter, kGt), EvaluationError);
  EXPECT_THROW(success_auc(shorter, kGt), EvaluationError);
  EXPECT_THROW(success_auc(std::vector<BoundingBox>{}, std::vector<BoundingBox>{}), EvaluationError);
}

TEST(Metrics, EvaluateBundlesEverything) {
  TrackTrace t, b;
  for (int i = 1; i <= 10; ++i) {
    FrameRecord r;
    r.frame = i;
    r.box = kGt[0];
    r.is_keyframe = i == 1;
    r.cost = i == 1 ? 100 : 20;
    t.records.push_back(r);
    t.total_cost += r.cost;
    r.cost = 100;
    b.records.push_back(r);
    b.total_cost += 100;
  }
  t.keyframe_count = 1;
  const MetricsReport m = evaluate(t, kGt, &b);
  EXPECT_NEAR(m.auc, 20.0 / 21.0, 1e-12);
  EXPECT_EQ(m.precision_at_20, 1.0);
  EXPECT_NEAR(m.keyframe_ratio, 0.1, 1e-12);
  ASSERT_TRUE(m.speedup_vs_baseline.has_value());
  EXPECT_NEAR(*m.speedup_vs_baseline, (1000.0 / 280.0 - 1.0) * 100.0, 1e-9);
}

}  // namespace
}  // namespace keyflow
