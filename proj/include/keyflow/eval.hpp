#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "keyflow/errors.hpp"
#include "keyflow/geometry.hpp"
#include "keyflow/tracker.hpp"

namespace keyflow {

inline constexpr int kPrecisionMaxThreshold = 50;  // pixels, step 1
inline constexpr int kSuccessSteps = 20;           // IoU thresholds j / 20, j = 0..20

struct PrecisionResult {
  std::vector<double> curve;  // index = threshold in pixels
  double at_20 = 0.0;
};

struct SuccessResult {
  std::vector<double> curve;  // index j = threshold j / 20
  double auc = 0.0;
};

namespace detail {

inline void check_lengths(std::span<const BoundingBox> trace, std::span<const BoundingBox> gt) {
  if (trace.size() != gt.size()) throw EvaluationError("metrics: trace and ground truth lengths differ");
  if (trace.empty()) throw EvaluationError("metrics: empty trace");
}

}  // namespace detail

/// Fraction of frames with center error <= tau for tau = 0..50 px.
inline PrecisionResult precision_curve(std::span<const BoundingBox> trace, std::span<const BoundingBox> gt) {
  detail::check_lengths(trace, gt);
  std::vector<double> err(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) err[i] = center_error(trace[i], gt[i]);
  PrecisionResult out;
  out.curve.resize(kPrecisionMaxThreshold + 1);
  for (int tau = 0; tau <= kPrecisionMaxThreshold; ++tau) {
    std::size_t hits = 0;
    for (double e : err) hits += e <= tau ? 1 : 0;
    out.curve[static_cast<std::size_t>(tau)] = static_cast<double>(hits) / static_cast<double>(err.size());
  }
  out.at_20 = out.curve[20];
  return out;
}

/// Fraction of frames with iou > theta for theta = 0, 0.05, ..., 1 (strict),
/// and the mean of those 21 values.
inline SuccessResult success_auc(std::span<const BoundingBox> trace, std::span<const BoundingBox> gt) {
  detail::check_lengths(trace, gt);
  std::vector<double> ov(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) ov[i] = iou(trace[i], gt[i]);
  SuccessResult out;
  out.curve.resize(kSuccessSteps + 1);
  double sum = 0.0;
  for (int j = 0; j <= kSuccessSteps; ++j) {
    const double theta = static_cast<double>(j) / kSuccessSteps;
    std::size_t hits = 0;
    for (double o : ov) hits += o > theta ? 1 : 0;
    const double v = static_cast<double>(hits) / static_cast<double>(ov.size());
    out.curve[static_cast<std::size_t>(j)] = v;
    sum += v;
  }
  out.auc = sum / (kSuccessSteps + 1);
  return out;
}

struct MetricsReport {
  std::vector<double> precision_curve;
  double precision_at_20 = 0.0;
  std::vector<double> success_curve;
  double auc = 0.0;
  double keyframe_ratio = 0.0;
  double total_cost = 0.0;
  std::optional<double> speedup_vs_baseline;
};

inline MetricsReport evaluate(const TrackTrace& trace, std::span<const BoundingBox> gt,
                              const TrackTrace* baseline = nullptr) {
  const std::vector<BoundingBox> boxes = trace.boxes();
  PrecisionResult p = precision_curve(boxes, gt);
  SuccessResult s = success_auc(boxes, gt);
  MetricsReport r;
  r.precision_curve = std::move(p.curve);
  r.precision_at_20 = p.at_20;
  r.success_curve = std::move(s.curve);
  r.auc = s.auc;
  r.keyframe_ratio = trace.keyframe_ratio();
  r.total_cost = trace.total_cost;
  if (baseline) r.speedup_vs_baseline = speedup(trace, *baseline);
  return r;
}

}  // namespace keyflow
