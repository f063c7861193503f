#pragma once

#include <limits>

#include "keyflow/errors.hpp"

namespace keyflow {

/// Adaptive keyframe decision. Frame i (1-based) is a keyframe when it falls
/// on the fixed interval, (i - 1) mod k == 0, or when the most recent
/// keyframe score is at or below the threshold.
class KeyframeScheduler {
 public:
  KeyframeScheduler(int k, double threshold) : k_(k), threshold_(threshold) {
    if (k < 1) throw ConfigError("scheduler: k must be >= 1");
  }

  [[nodiscard]] bool is_keyframe(int frame) const {
    return (frame - 1) % k_ == 0 || last_score_ <= threshold_;
  }

  // Only keyframes record; the score carries over non-keyframes untouched.
  void record_score(double score) { last_score_ = score; }

  [[nodiscard]] int interval() const { return k_; }
  [[nodiscard]] double threshold() const { return threshold_; }
  [[nodiscard]] double last_score() const { return last_score_; }

 private:
  int k_;
  double threshold_;
  double last_score_ = std::numeric_limits<double>::infinity();
};

}  // namespace keyflow
