#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "keyflow/errors.hpp"
#include "keyflow/flow.hpp"
#include "keyflow/geometry.hpp"
#include "keyflow/observation.hpp"
#include "keyflow/random.hpp"

namespace keyflow {

enum class TrajectoryKind { kLinear, kSinusoidal, kPiecewise };

inline std::string_view to_string(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::kLinear: return "linear";
    case TrajectoryKind::kSinusoidal: return "sinusoidal";
    case TrajectoryKind::kPiecewise: return "piecewise";
  }
  return "linear";
}

inline TrajectoryKind parse_trajectory_kind(std::string_view s) {
  if (s == "linear") return TrajectoryKind::kLinear;
  if (s == "sinusoidal") return TrajectoryKind::kSinusoidal;
  if (s == "piecewise") return TrajectoryKind::kPiecewise;
  throw ConfigError("unknown trajectory kind '" + std::string(s) + "'");
}

struct TrajectorySegment {
  int frames = 1;  // number of frame-to-frame steps driven by this velocity
  Point velocity;
  friend bool operator==(const TrajectorySegment&, const TrajectorySegment&) = default;
};

/// Center path of the target, with c0 the center of the initial box:
///   linear:     c(i) = c0 + v (i - 1)
///   sinusoidal: c(i) = c0 + v (i - 1) + (0, A sin(2 pi i / P))
///   piecewise:  c(1) = c0, each later step adds the velocity of the segment
///               it falls in; the last segment's velocity persists.
/// Size follows w(i) = w0 * scale_rate^(i - 1), likewise h.
struct Trajectory {
  TrajectoryKind kind = TrajectoryKind::kLinear;
  Point velocity{2.0, 0.0};
  double amplitude = 0.0;
  double period = 60.0;
  std::vector<TrajectorySegment> segments;
  double scale_rate = 1.0;
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct SequenceSpec {
  int width = 320;
  int height = 240;
  int frames = 300;
  BoundingBox initial_box{40.0, 100.0, 40.0, 40.0};
  Trajectory trajectory;
  double flow_noise_sigma = 0.0;
  std::vector<DifficultyWindow> windows;
  std::uint64_t seed = 0;

  void validate() const {
    if (width < 1 || height < 1) throw ConfigError("sequence: width and height must be >= 1");
    if (frames < 1) throw ConfigError("sequence: frames must be >= 1");
    if (!initial_box.valid()) throw ConfigError("sequence: invalid initial box");
    if (!(flow_noise_sigma >= 0.0) || !std::isfinite(flow_noise_sigma)) {
      throw ConfigError("sequence: flow_noise_sigma must be finite and >= 0");
    }
    if (!(trajectory.scale_rate > 0.0) || !std::isfinite(trajectory.scale_rate)) {
      throw ConfigError("sequence: scale_rate must be finite and > 0");
    }
    if (trajectory.kind == TrajectoryKind::kSinusoidal && !(trajectory.period > 0.0)) {
      throw ConfigError("sequence: sinusoidal period must be > 0");
    }
    if (trajectory.kind == TrajectoryKind::kPiecewise) {
      if (trajectory.segments.empty()) throw ConfigError("sequence: piecewise trajectory needs segments");
      for (const auto& s : trajectory.segments) {
        if (s.frames < 1) throw ConfigError("sequence: segment frames must be >= 1");
      }
    }
    for (const auto& w : windows) {
      if (w.start < 1 || w.end < w.start || w.end > frames) {
        throw ConfigError("sequence: difficulty window [" + std::to_string(w.start) + ", " +
                          std::to_string(w.end) + "] outside 1.." + std::to_string(frames));
      }
      if (!(w.penalty >= 0.0)) throw ConfigError("sequence: window penalty must be >= 0");
      if (!std::isfinite(w.flow_gain)) throw ConfigError("sequence: window flow_gain must be finite");
    }
  }

  friend bool operator==(const SequenceSpec&, const SequenceSpec&) = default;
};

/// Ground-truth boxes for frames 1..frames (index i-1). Throws SequenceError
/// when the target leaves the frame; boxes are never clamped.
inline std::vector<BoundingBox> ground_truth_boxes(const SequenceSpec& spec) {
  spec.validate();
  const Trajectory& tr = spec.trajectory;
  const Point c0 = spec.initial_box.center();
  std::vector<BoundingBox> boxes;
  boxes.reserve(static_cast<std::size_t>(spec.frames));

  Point c = c0;
  std::size_t seg = 0;
  int seg_used = 0;
  for (int i = 1; i <= spec.frames; ++i) {
    const double n = i - 1;
    switch (tr.kind) {
      case TrajectoryKind::kLinear:
        c = {c0.x + tr.velocity.x * n, c0.y + tr.velocity.y * n};
        break;
      case TrajectoryKind::kSinusoidal:
        c = {c0.x + tr.velocity.x * n,
             c0.y + tr.velocity.y * n + tr.amplitude * std::sin(2.0 * std::numbers::pi * i / tr.period)};
        break;
      case TrajectoryKind::kPiecewise:
        if (i > 1) {
          if (seg_used == tr.segments[seg].frames && seg + 1 < tr.segments.size()) {
            ++seg;
            seg_used = 0;
          }
          c = {c.x + tr.segments[seg].velocity.x, c.y + tr.segments[seg].velocity.y};
          ++seg_used;
        }
        break;
    }
    const double f = std::pow(tr.scale_rate, n);
    const BoundingBox b = BoundingBox::from_center(c, spec.initial_box.w * f, spec.initial_box.h * f);
    constexpr double kSlack = 1e-9;
    if (!b.valid() || b.x < -kSlack || b.y < -kSlack || b.right() > spec.width + kSlack ||
        b.bottom() > spec.height + kSlack) {
      throw SequenceError("sequence: trajectory leaves the frame at frame " + std::to_string(i));
    }
    boxes.push_back(b);
  }
  return boxes;
}

/// Flow field from frame i-1 to frame i. Pixels inside gt(i-1) carry the
/// target's affine motion (translation plus radial scale about the center),
/// scaled by the enclosing window's flow_gain; background is static. Noise
/// of flow_noise_sigma is then added to every component.
inline FlowField synthesize_flow(const SequenceSpec& spec, const BoundingBox& prev,
                                 const BoundingBox& cur, int frame) {
  const Point pc = prev.center();
  const Point cc = cur.center();
  const double sx = cur.w / prev.w;
  const double sy = cur.h / prev.h;
  double gain = 1.0;
  for (const auto& w : spec.windows) {
    if (w.contains(frame)) {
      gain = w.flow_gain;
      break;
    }
  }

  std::vector<FlowVector> v(static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height));
  const int x_lo = std::max(0, static_cast<int>(std::ceil(prev.x)));
  const int x_hi = std::min(spec.width - 1, static_cast<int>(std::floor(prev.right())));
  const int y_lo = std::max(0, static_cast<int>(std::ceil(prev.y)));
  const int y_hi = std::min(spec.height - 1, static_cast<int>(std::floor(prev.bottom())));
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      const double dx = (cc.x - pc.x) + (sx - 1.0) * (x - pc.x);
      const double dy = (cc.y - pc.y) + (sy - 1.0) * (y - pc.y);
      auto& fv = v[static_cast<std::size_t>(y) * static_cast<std::size_t>(spec.width) +
                   static_cast<std::size_t>(x)];
      fv.dx = static_cast<float>(gain * dx);
      fv.dy = static_cast<float>(gain * dy);
    }
  }
  if (spec.flow_noise_sigma > 0.0) {
    std::mt19937_64 rng(derive_seed(spec.seed, Stream::kFlowNoise, static_cast<std::uint64_t>(frame)));
    std::normal_distribution<double> noise(0.0, spec.flow_noise_sigma);
    for (auto& fv : v) {
      fv.dx = static_cast<float>(fv.dx + noise(rng));
      fv.dy = static_cast<float>(fv.dy + noise(rng));
    }
  }
  return {spec.width, spec.height, std::move(v)};
}

/// An abstract sequence: dimensions, ground truth, flow fields and
/// difficulty windows. Flow fields are synthesized on first request (once
/// per frame, thread-safe) and then shared; the object is otherwise
/// immutable.
class SyntheticSequence {
 public:
  explicit SyntheticSequence(SequenceSpec spec)
      : spec_(std::move(spec)),
        gt_(ground_truth_boxes(spec_)),
        slots_(std::make_unique<Slot[]>(static_cast<std::size_t>(std::max(0, spec_.frames - 1)))) {}

  [[nodiscard]] int width() const { return spec_.width; }
  [[nodiscard]] int height() const { return spec_.height; }
  [[nodiscard]] int frame_count() const { return spec_.frames; }

  [[nodiscard]] const FlowField& flow(int frame) const {
    if (frame < 2 || frame > spec_.frames) {
      throw SequenceError("sequence: no flow into frame " + std::to_string(frame));
    }
    Slot& slot = slots_[static_cast<std::size_t>(frame - 2)];
    std::call_once(slot.once, [&] {
      slot.field = synthesize_flow(spec_, gt_[static_cast<std::size_t>(frame - 2)],
                                   gt_[static_cast<std::size_t>(frame - 1)], frame);
    });
    return slot.field;
  }

  [[nodiscard]] const SequenceSpec& spec() const { return spec_; }
  [[nodiscard]] const std::vector<BoundingBox>& gt_boxes() const { return gt_; }
  [[nodiscard]] const BoundingBox& gt(int frame) const { return gt_.at(static_cast<std::size_t>(frame - 1)); }
  [[nodiscard]] const std::vector<DifficultyWindow>& windows() const { return spec_.windows; }

 private:
  struct Slot {
    std::once_flag once;
    FlowField field;
  };

  SequenceSpec spec_;
  std::vector<BoundingBox> gt_;
  std::unique_ptr<Slot[]> slots_;
};

static_assert(FlowProvider<SyntheticSequence>);

inline SyntheticSequence generate_sequence(const SequenceSpec& spec) { return SyntheticSequence(spec); }

/// Variant of `base` with a random trajectory that stays inside the frame.
/// Dimensions, frame count, box size, scale rate, noise and windows are
/// kept; the path is drawn from `seed`. Only sinusoidal and piecewise
/// paths are drawn, since a straight line that must stay in the frame for
/// the whole sequence is too slow to stress propagation. Paths are built
/// inside the region where the largest box still fits.
inline SequenceSpec randomized_spec(const SequenceSpec& base, std::uint64_t seed) {
  base.validate();
  SequenceSpec out = base;
  out.seed = seed;
  std::mt19937_64 rng(derive_seed(seed, Stream::kTrajectory, 0));
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  const double grow = std::max(1.0, std::pow(base.trajectory.scale_rate, base.frames - 1));
  const double half_w = 0.5 * base.initial_box.w * grow;
  const double half_h = 0.5 * base.initial_box.h * grow;
  const double lo_x = half_w + 1.0, hi_x = base.width - half_w - 1.0;
  const double lo_y = half_h + 1.0, hi_y = base.height - half_h - 1.0;
  if (hi_x <= lo_x || hi_y <= lo_y) throw ConfigError("randomized_spec: box does not fit the frame");
  auto draw_point = [&] { return Point{lo_x + (hi_x - lo_x) * u01(rng), lo_y + (hi_y - lo_y) * u01(rng)}; };

  const int steps = std::max(1, base.frames - 1);
  Trajectory tr;
  tr.scale_rate = base.trajectory.scale_rate;
  Point start = draw_point();
  if (rng() % 2 == 0) {
    tr.kind = TrajectoryKind::kSinusoidal;
    start.y = 0.5 * (lo_y + hi_y) + 0.2 * (hi_y - lo_y) * (u01(rng) - 0.5);
    const double margin = std::min(start.y - lo_y, hi_y - start.y);
    tr.amplitude = margin * (0.6 + 0.4 * u01(rng));
    tr.period = 30.0 + 60.0 * u01(rng);
    const double end_x = lo_x + (hi_x - lo_x) * u01(rng);
    tr.velocity = {(end_x - start.x) / steps, 0.0};
  } else {
    tr.kind = TrajectoryKind::kPiecewise;
    Point at = start;
    int remaining = steps;
    while (remaining > 0) {
      const int len = std::min(remaining, 20 + static_cast<int>(rng() % 31));
      const Point next = draw_point();
      tr.segments.push_back({len, {(next.x - at.x) / len, (next.y - at.y) / len}});
      at = next;
      remaining -= len;
    }
  }
  out.trajectory = tr;
  out.initial_box = BoundingBox::from_center(start, base.initial_box.w, base.initial_box.h);
  // Accumulated rounding can graze the margin; ground_truth_boxes() is the
  // final arbiter.
  (void)ground_truth_boxes(out);
  return out;
}

}  // namespace keyflow
