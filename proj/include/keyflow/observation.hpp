#pragma once

#include <bit>
#include <concepts>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "keyflow/errors.hpp"
#include "keyflow/geometry.hpp"
#include "keyflow/random.hpp"

namespace keyflow {

/// Observation model: positive score of a candidate on a frame, plus a model
/// update hook that the tracker calls on keyframes only. call_cost() is the
/// simulated cost of one score() call.
template <typename S>
concept Scorer = requires(S& s, const S& cs, int frame, const BoundingBox& b) {
  { s.score(frame, b) } -> std::convertible_to<double>;
  s.update(frame, b);
  { cs.call_cost() } -> std::convertible_to<double>;
};

struct ScoredCandidate {
  BoundingBox box;
  double score = 0.0;
};

struct Selection {
  std::size_t index = 0;
  BoundingBox box;
  double score = 0.0;
};

/// Argmax over scores; the lowest index wins ties.
inline Selection select_best(std::span<const ScoredCandidate> scored) {
  if (scored.empty()) throw InternalError("select_best: empty candidate list");
  std::size_t best = 0;
  for (std::size_t j = 1; j < scored.size(); ++j) {
    if (scored[j].score > scored[best].score) best = j;
  }
  return {best, scored[best].box, scored[best].score};
}

/// Frames [start, end] (inclusive, 1-based) where the observation model is
/// less confident by `penalty` score units. `flow_gain` scales the true
/// target motion reported by synthetic flow inside the window (1 = exact).
struct DifficultyWindow {
  int start = 1;
  int end = 1;
  double penalty = 0.0;
  double flow_gain = 1.0;

  [[nodiscard]] bool contains(int frame) const { return frame >= start && frame <= end; }
  friend bool operator==(const DifficultyWindow&, const DifficultyWindow&) = default;
};

/// Penalty of the first window containing `frame`, else 0.
inline double window_penalty(std::span<const DifficultyWindow> windows, int frame) {
  for (const auto& w : windows) {
    if (w.contains(frame)) return w.penalty;
  }
  return 0.0;
}

struct SyntheticScorerParams {
  double scale = 30.0;       // score of a perfect overlap
  double noise_sigma = 0.0;  // additive Gaussian noise
  double call_cost = 0.0;

  void validate() const {
    if (!(scale > 0.0)) throw ConfigError("scorer: scale must be > 0");
    if (!(noise_sigma >= 0.0)) throw ConfigError("scorer: noise_sigma must be >= 0");
    if (!(call_cost >= 0.0)) throw ConfigError("scorer: call_cost must be >= 0");
  }
};

/// Oracle scorer: scale * iou(candidate, gt) - window penalty + noise. The
/// noise is keyed on (seed, frame, candidate), so identical queries always
/// return identical scores regardless of call order.
class SyntheticScorer {
 public:
  struct UpdateCall {
    int frame;
    BoundingBox box;
  };

  SyntheticScorer(std::vector<BoundingBox> gt_boxes, std::vector<DifficultyWindow> windows,
                  SyntheticScorerParams params, std::uint64_t seed)
      : gt_(std::move(gt_boxes)), windows_(std::move(windows)), params_(params), seed_(seed) {
    params_.validate();
    for (const auto& w : windows_) {
      if (w.penalty < 0.0) throw ConfigError("scorer: window penalty must be >= 0");
      if (w.start < 1 || w.end < w.start || w.end > static_cast<int>(gt_.size())) {
        throw ConfigError("scorer: difficulty window outside the sequence");
      }
    }
  }

  double score(int frame, const BoundingBox& candidate) {
    if (frame < 1 || frame > static_cast<int>(gt_.size())) {
      throw SequenceError("scorer: frame " + std::to_string(frame) + " out of range");
    }
    ++score_calls_;
    double s = params_.scale * iou(candidate, gt_[static_cast<std::size_t>(frame - 1)]) -
               window_penalty(windows_, frame);
    if (params_.noise_sigma > 0.0) s += params_.noise_sigma * noise(frame, candidate);
    return s;
  }

  void update(int frame, const BoundingBox& estimated) { updates_.push_back({frame, estimated}); }

  [[nodiscard]] double call_cost() const { return params_.call_cost; }
  [[nodiscard]] const std::vector<UpdateCall>& update_log() const { return updates_; }
  [[nodiscard]] std::uint64_t score_calls() const { return score_calls_; }
  [[nodiscard]] int frame_count() const { return static_cast<int>(gt_.size()); }

 private:
  [[nodiscard]] double noise(int frame, const BoundingBox& b) const {
    std::uint64_t key = derive_seed(seed_, Stream::kScorerNoise, static_cast<std::uint64_t>(frame));
    for (double v : {b.x, b.y, b.w, b.h}) key = splitmix64(key ^ std::bit_cast<std::uint64_t>(v));
    SplitMix64 gen(key);
    std::normal_distribution<double> unit(0.0, 1.0);
    return unit(gen);
  }

  std::vector<BoundingBox> gt_;
  std::vector<DifficultyWindow> windows_;
  SyntheticScorerParams params_;
  std::uint64_t seed_;
  std::vector<UpdateCall> updates_;
  std::uint64_t score_calls_ = 0;
};

static_assert(Scorer<SyntheticScorer>);

}  // namespace keyflow
