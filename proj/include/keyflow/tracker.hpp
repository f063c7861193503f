#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "keyflow/errors.hpp"
#include "keyflow/flow.hpp"
#include "keyflow/geometry.hpp"
#include "keyflow/motion.hpp"
#include "keyflow/observation.hpp"
#include "keyflow/propagation.hpp"
#include "keyflow/random.hpp"
#include "keyflow/scheduler.hpp"

namespace keyflow {

struct TrackerConfig {
  int k = 3;          // fixed keyframe interval
  double t = 10.0;    // score threshold, may be +/-infinity
  int q = 256;        // candidates per keyframe
  int m = 100;        // sample points per non-keyframe
  double kr = 0.9;    // keep ratio
  double ar = 0.4;    // adaptive ratio
  BlendMode blend_mode = BlendMode::kSizeOnly;
  double scale_min = 0.9;
  double scale_max = 1.1;
  MotionParams motion;
  std::uint64_t seed = 0;

  [[nodiscard]] PropagationParams propagation() const {
    return {m, kr, ar, scale_min, scale_max, blend_mode};
  }

  void validate() const {
    if (k < 1) throw ConfigError("tracker: k must be >= 1");
    if (q < 1) throw ConfigError("tracker: q must be >= 1");
    if (std::isnan(t)) throw ConfigError("tracker: t must not be NaN");
    propagation().validate();
    motion.validate();
  }

  friend bool operator==(const TrackerConfig&, const TrackerConfig&) = default;
};

/// Configuration that makes every frame a keyframe with otherwise identical
/// settings; the reference run for speedup.
inline TrackerConfig all_keyframe_config(TrackerConfig cfg) {
  cfg.k = 1;
  cfg.t = std::numeric_limits<double>::infinity();
  return cfg;
}

struct CostModel {
  double cost_keyframe = 100.0;
  double cost_nonkey = 18.0;

  void validate() const {
    if (!(cost_nonkey > 0.0) || !(cost_keyframe > cost_nonkey) || !std::isfinite(cost_keyframe)) {
      throw ConfigError("costs: require cost_keyframe > cost_nonkey > 0");
    }
  }
};

struct FrameRecord {
  int frame = 0;
  BoundingBox box;
  bool is_keyframe = false;
  std::optional<double> score;  // present iff is_keyframe
  double cost = 0.0;
  bool escalated = false;  // non-keyframe whose propagation failed
  std::int64_t wall_ns = 0;  // not part of equality or serialization

  friend bool operator==(const FrameRecord& a, const FrameRecord& b) {
    return a.frame == b.frame && a.box == b.box && a.is_keyframe == b.is_keyframe &&
           a.score == b.score && a.cost == b.cost && a.escalated == b.escalated;
  }
};

struct TrackTrace {
  TrackerConfig config;
  CostModel costs;
  std::vector<FrameRecord> records;
  double total_cost = 0.0;
  int keyframe_count = 0;
  int escalation_count = 0;

  [[nodiscard]] double keyframe_ratio() const {
    return records.empty() ? 0.0 : static_cast<double>(keyframe_count) / static_cast<double>(records.size());
  }

  [[nodiscard]] std::vector<BoundingBox> boxes() const {
    std::vector<BoundingBox> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.box);
    return out;
  }

  [[nodiscard]] std::vector<int> keyframes() const {
    std::vector<int> out;
    for (const auto& r : records) {
      if (r.is_keyframe) out.push_back(r.frame);
    }
    return out;
  }

  /// Records, totals and counts match; the config snapshot is ignored.
  [[nodiscard]] bool same_run(const TrackTrace& o) const {
    return records == o.records && total_cost == o.total_cost && keyframe_count == o.keyframe_count &&
           escalation_count == o.escalation_count;
  }
};

/// Percentage by which `trace` is cheaper than `baseline`:
/// (baseline.total_cost / trace.total_cost - 1) * 100.
inline double speedup(const TrackTrace& trace, const TrackTrace& baseline) {
  if (trace.records.size() != baseline.records.size()) {
    throw EvaluationError("speedup: traces cover different sequence lengths");
  }
  if (!(trace.total_cost > 0.0)) throw EvaluationError("speedup: trace has zero cost");
  return (baseline.total_cost / trace.total_cost - 1.0) * 100.0;
}

/// The same quantity from throughput figures (frames per second).
inline double speedup_from_rates(double rate, double baseline_rate) {
  if (!(baseline_rate > 0.0)) throw EvaluationError("speedup: baseline rate must be > 0");
  return (rate / baseline_rate - 1.0) * 100.0;
}

/// Closed form for a run with keyframe ratio r and no escalations.
inline double speedup_closed_form(double r, const CostModel& c) {
  return 100.0 * (c.cost_keyframe / (r * c.cost_keyframe + (1.0 - r) * c.cost_nonkey) - 1.0);
}

namespace detail {

template <Scorer S>
FrameRecord run_keyframe(int frame, const BoundingBox& prev, S& scorer, const TrackerConfig& cfg,
                         double width, double height, std::vector<ScoredCandidate>& scratch) {
  const CandidateSet set = generate_candidates(
      prev, cfg.q, width, height, derive_seed(cfg.seed, Stream::kCandidates, static_cast<std::uint64_t>(frame)),
      cfg.motion);
  scratch.clear();
  for (const BoundingBox& c : set.candidates) scratch.push_back({c, scorer.score(frame, c)});
  const Selection best = select_best(scratch);
  FrameRecord rec;
  rec.frame = frame;
  rec.box = best.box;
  rec.is_keyframe = true;
  rec.score = best.score;
  return rec;
}

}  // namespace detail

/// Runs the keyframe/flow collaborative loop over frames 1..C.
///
/// Keyframes (fixed interval, or last keyframe score <= t) sample q Gaussian
/// candidates around the previous box, keep the best-scoring one, record
/// its score and call scorer.update(). Other frames sample m points in the
/// previous box, move them through flow(i), trim outliers and estimate the
/// new box. If propagation fails (no usable points, or the box leaves the
/// frame) the frame is escalated to a keyframe and charged both costs.
///
/// `log`, when given, receives one line per escalation.
template <Scorer S, FlowProvider F>
TrackTrace track_sequence(const F& flow, const BoundingBox& b0, S& scorer, const TrackerConfig& cfg,
                          const CostModel& costs, std::vector<std::string>* log = nullptr) {
  cfg.validate();
  costs.validate();
  const int frames = flow.frame_count();
  if (frames < 1) throw SequenceError("track_sequence: sequence has no frames");
  if (!b0.valid()) throw ConfigError("track_sequence: invalid initial box");
  const double width = flow.width();
  const double height = flow.height();
  const PropagationParams prop = cfg.propagation();

  KeyframeScheduler scheduler(cfg.k, cfg.t);
  TrackTrace trace;
  trace.config = cfg;
  trace.costs = costs;
  trace.records.reserve(static_cast<std::size_t>(frames));
  std::vector<ScoredCandidate> scratch;
  scratch.reserve(static_cast<std::size_t>(cfg.q));
  const double keyframe_cost = costs.cost_keyframe + cfg.q * scorer.call_cost();

  BoundingBox prev = clamp_box(b0, width, height);
  for (int i = 1; i <= frames; ++i) {
    const auto started = std::chrono::steady_clock::now();
    FrameRecord rec;
    bool keyframe = scheduler.is_keyframe(i);
    bool escalated = false;

    if (!keyframe) {
      const FlowField& field = flow.flow(i);
      if (field.width() != flow.width() || field.height() != flow.height()) {
        throw SequenceError("track_sequence: flow into frame " + std::to_string(i) +
                            " does not match the frame dimensions");
      }
      try {
        const std::vector<Point> before = sample_points(prev, prop.m);
        const std::vector<Point> after = propagate_points(field, before);
        const std::vector<std::size_t> kept = trim_outliers(before, after, prop.kr);
        const BoundingBox moved = estimate_box(prev, before, after, kept, prop);
        if (intersection_area(moved, BoundingBox{0.0, 0.0, width, height}) <= 0.0) {
          throw PropagationError("propagated box left the frame");
        }
        rec.frame = i;
        rec.box = clamp_box(moved, width, height);
        rec.cost = costs.cost_nonkey;
      } catch (const PropagationError& e) {
        if (log) log->push_back("frame " + std::to_string(i) + ": escalated to keyframe: " + e.what());
        keyframe = true;
        escalated = true;
      }
    }

    if (keyframe) {
      rec = detail::run_keyframe(i, prev, scorer, cfg, width, height, scratch);
      scheduler.record_score(*rec.score);
      scorer.update(i, rec.box);
      rec.cost = keyframe_cost + (escalated ? costs.cost_nonkey : 0.0);
      rec.escalated = escalated;
      ++trace.keyframe_count;
      if (escalated) ++trace.escalation_count;
    }

    rec.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                      std::chrono::steady_clock::now() - started)
                      .count();
    trace.total_cost += rec.cost;
    prev = rec.box;
    trace.records.push_back(rec);
  }
  return trace;
}

}  // namespace keyflow
