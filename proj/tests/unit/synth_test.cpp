#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "keyflow/synth.hpp"

namespace keyflow {
namespace {

SequenceSpec small_spec() {
  SequenceSpec s;
  s.width = 120;
  s.height = 90;
  s.frames = 20;
  s.initial_box = {10, 20, 20, 16};
  s.trajectory.velocity = {2.0, 0.0};
  return s;
}

TEST(GroundTruth, LinearStep) {
  const auto gt = ground_truth_boxes(small_spec());
  ASSERT_EQ(gt.size(), 20u);
  EXPECT_EQ(gt[0], (BoundingBox{10, 20, 20, 16}));
  for (std::size_t i = 1; i < gt.size(); ++i) {
    EXPECT_NEAR(gt[i].x - gt[i - 1].x, 2.0, 1e-12);
    EXPECT_NEAR(gt[i].y - gt[i - 1].y, 0.0, 1e-12);
  }
}

TEST(GroundTruth, SinusoidalClosedForm) {
  SequenceSpec s = small_spec();
  s.height = 200;
  s.initial_box = {10, 80, 20, 16};
  s.trajectory.kind = TrajectoryKind::kSinusoidal;
  s.trajectory.velocity = {1.0, 0.0};
  s.trajectory.amplitude = 30.0;
  s.trajectory.period = 10.0;
  const auto gt = ground_truth_boxes(s);
  const Point c0 = s.initial_box.center();
  for (int i = 1; i <= s.frames; ++i) {
    const Point c = gt[static_cast<std::size_t>(i - 1)].center();
    EXPECT_NEAR(c.x, c0.x + (i - 1), 1e-9);
    EXPECT_NEAR(c.y, c0.y + 30.0 * std::sin(2.0 * std::numbers::pi * i / 10.0), 1e-9);
  }
}

TEST(GroundTruth, PiecewiseAccumulates) {
  SequenceSpec s = small_spec();
  s.trajectory.kind = TrajectoryKind::kPiecewise;
  s.trajectory.segments = {{3, {1.0, 0.0}}, {2, {0.0, 2.0}}};
  s.frames = 8;
  const auto gt = ground_truth_boxes(s);
  // steps into frames 2..4 use the first segment, 5..6 the second, then the
  // last velocity persists
  EXPECT_NEAR(gt[3].x - gt[0].x, 3.0, 1e-12);
  EXPECT_NEAR(gt[3].y - gt[0].y, 0.0, 1e-12);
  EXPECT_NEAR(gt[5].y - gt[3].y, 4.0, 1e-12);
  EXPECT_NEAR(gt[7].y - gt[5].y, 4.0, 1e-12);
  EXPECT_NEAR(gt[7].x - gt[3].x, 0.0, 1e-12);
}

TEST(GroundTruth, ScaleRate) {
  SequenceSpec s = small_spec();
  s.trajectory.velocity = {0, 0};
  s.trajectory.scale_rate = 1.01;
  const auto gt = ground_truth_boxes(s);
  EXPECT_NEAR(gt[10].w, 20.0 * std::pow(1.01, 10), 1e-9);
  EXPECT_NEAR(gt[10].center().x, s.initial_box.center().x, 1e-9);
}

TEST(GroundTruth, ExitRaises) {
  SequenceSpec s = small_spec();
  s.trajectory.velocity = {6.0, 0.0};
  EXPECT_THROW(ground_truth_boxes(s), SequenceError);
}

TEST(GroundTruth, InvalidSpecRaises) {
  SequenceSpec s = small_spec();
  s.frames = 0;
  EXPECT_THROW(ground_truth_boxes(s), ConfigError);
  s = small_spec();
  s.windows = {{5, 30, 1.0, 1.0}};
  EXPECT_THROW(ground_truth_boxes(s), ConfigError);
}

TEST(SynthesizeFlow, NoiselessInsideTargetIsExactMotion) {
  const SequenceSpec s = small_spec();
  const SyntheticSequence seq(s);
  EXPECT_EQ(seq.width(), 120);
  EXPECT_EQ(seq.height(), 90);
  EXPECT_EQ(seq.frame_count(), 20);
  for (int i : {2, 7, 20}) {
    const FlowField& f = seq.flow(i);
    ASSERT_EQ(f.width(), 120);
    ASSERT_EQ(f.height(), 90);
    const BoundingBox& prev = seq.gt(i - 1);
    for (int y = 0; y < 90; ++y) {
      for (int x = 0; x < 120; ++x) {
        const bool inside = x >= prev.x && x <= prev.right() && y >= prev.y && y <= prev.bottom();
        const FlowVector v = f.at(x, y);
        if (inside) {
          ASSERT_FLOAT_EQ(v.dx, 2.0f);
          ASSERT_FLOAT_EQ(v.dy, 0.0f);
        } else {
          ASSERT_EQ(v.dx, 0.0f);
          ASSERT_EQ(v.dy, 0.0f);
        }
      }
    }
  }
  EXPECT_THROW((void)seq.flow(1), SequenceError);
  EXPECT_THROW((void)seq.flow(21), SequenceError);
}

TEST(SynthesizeFlow, ScaleMotionIsAffineAboutCenter) {
  SequenceSpec s = small_spec();
  s.trajectory.velocity = {0, 0};
  s.trajectory.scale_rate = 1.02;
  s.initial_box = {40, 30, 20, 20};
  const SyntheticSequence seq(s);
  const FlowField& f = seq.flow(2);
  const Point c = seq.gt(1).center();
  const FlowVector v = f.at(45, 35);
  EXPECT_NEAR(v.dx, 0.02 * (45 - c.x), 1e-5);
  EXPECT_NEAR(v.dy, 0.02 * (35 - c.y), 1e-5);
}

TEST(SynthesizeFlow, WindowGainScalesTargetMotion) {
  SequenceSpec s = small_spec();
  s.windows = {{5, 6, 10.0, 0.0}};
  const SyntheticSequence seq(s);
  const BoundingBox& p = seq.gt(4);
  EXPECT_EQ(seq.flow(5).at(static_cast<int>(p.x) + 2, static_cast<int>(p.y) + 2).dx, 0.0f);
  const BoundingBox& q = seq.gt(6);
  EXPECT_FLOAT_EQ(seq.flow(7).at(static_cast<int>(q.x) + 2, static_cast<int>(q.y) + 2).dx, 2.0f);
}

TEST(SynthesizeFlow, NoiseIsDeterministicPerSeed) {
  SequenceSpec s = small_spec();
  s.flow_noise_sigma = 0.5;
  s.seed = 4;
  const SyntheticSequence a(s), b(s);
  EXPECT_EQ(a.flow(9), b.flow(9));
  s.seed = 5;
  const SyntheticSequence c(s);
  EXPECT_FALSE(a.flow(9) == c.flow(9));
  // background std close to sigma
  double sum = 0, sq = 0;
  int n = 0;
  for (int y = 60; y < 90; ++y) {
    for (int x = 0; x < 120; ++x) {
      const double v = a.flow(9).at(x, y).dx;
      sum += v;
      sq += v * v;
      ++n;
    }
  }
  const double mean = sum / n;
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 0.5, 0.03);
}

TEST(RandomizedSpec, StaysInFrameAndIsDeterministic) {
  SequenceSpec base;
  base.windows = {{40, 70, 25.0, 0.0}};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const SequenceSpec r = randomized_spec(base, seed);
    const auto gt = ground_truth_boxes(r);
    for (const auto& b : gt) {
      ASSERT_GE(b.x, 0.0);
      ASSERT_GE(b.y, 0.0);
      ASSERT_LE(b.right(), base.width);
      ASSERT_LE(b.bottom(), base.height);
    }
    EXPECT_EQ(r.windows, base.windows);
    EXPECT_EQ(r.frames, base.frames);
    EXPECT_EQ(r, randomized_spec(base, seed));
  }
  EXPECT_NE(randomized_spec(base, 1), randomized_spec(base, 2));
}

TEST(TrajectoryKind, ParseRoundTrip) {
  for (auto k : {TrajectoryKind::kLinear, TrajectoryKind::kSinusoidal, TrajectoryKind::kPiecewise}) {
    EXPECT_EQ(parse_trajectory_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_trajectory_kind("spiral"), ConfigError);
}

}  // namespace
}  // namespace keyflow
