#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "keyflow/errors.hpp"
#include "keyflow/eval.hpp"
#include "keyflow/geometry.hpp"
#include "keyflow/observation.hpp"
#include "keyflow/synth.hpp"
#include "keyflow/tracker.hpp"

namespace keyflow {

using json = nlohmann::json;

/// Thresholds may be infinite; JSON has no infinity, so those are written
/// as the strings "inf" / "-inf".
inline json threshold_to_json(double t) {
  if (std::isinf(t)) return t > 0 ? "inf" : "-inf";
  return t;
}

inline double threshold_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity" || s == "+infinity") {
      return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf" || s == "-infinity") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError("threshold must be a number, \"inf\" or \"-inf\"");
}

inline std::string threshold_label(double t) {
  if (std::isinf(t)) return t > 0 ? "inf" : "-inf";
  json j = t;
  return j.dump();
}

inline json box_to_json(const BoundingBox& b) { return json::array({b.x, b.y, b.w, b.h}); }

inline BoundingBox box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw FormatError("box must be an array [x, y, w, h]");
  BoundingBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!b.valid()) throw FormatError("box must have finite fields and positive size");
  return b;
}

inline json point_to_json(const Point& p) { return json::array({p.x, p.y}); }

inline json window_to_json(const DifficultyWindow& w) {
  return {{"start", w.start}, {"end", w.end}, {"penalty", w.penalty}, {"flow_gain", w.flow_gain}};
}

inline json trajectory_to_json(const Trajectory& t) {
  json j = {{"kind", std::string(to_string(t.kind))},
            {"velocity", point_to_json(t.velocity)},
            {"scale_rate", t.scale_rate}};
  if (t.kind == TrajectoryKind::kSinusoidal) {
    j["amplitude"] = t.amplitude;
    j["period"] = t.period;
  }
  if (t.kind == TrajectoryKind::kPiecewise) {
    json segs = json::array();
    for (const auto& s : t.segments) segs.push_back({{"frames", s.frames}, {"velocity", point_to_json(s.velocity)}});
    j["segments"] = segs;
  }
  return j;
}

inline json spec_to_json(const SequenceSpec& s) {
  json windows = json::array();
  for (const auto& w : s.windows) windows.push_back(window_to_json(w));
  return {{"width", s.width},
          {"height", s.height},
          {"frames", s.frames},
          {"box", box_to_json(s.initial_box)},
          {"trajectory", trajectory_to_json(s.trajectory)},
          {"flow_noise_sigma", s.flow_noise_sigma},
          {"windows", windows},
          {"seed", s.seed}};
}

inline json tracker_config_to_json(const TrackerConfig& c) {
  return {{"k", c.k},
          {"t", threshold_to_json(c.t)},
          {"q", c.q},
          {"m", c.m},
          {"kr", c.kr},
          {"ar", c.ar},
          {"blend_mode", std::string(to_string(c.blend_mode))},
          {"scale_clamp", json::array({c.scale_min, c.scale_max})},
          {"motion",
           {{"translation_std", c.motion.translation_std},
            {"scale_std", c.motion.scale_std},
            {"scale_base", c.motion.scale_base}}},
          {"seed", c.seed}};
}

inline json costs_to_json(const CostModel& c) {
  return {{"keyframe", c.cost_keyframe}, {"nonkey", c.cost_nonkey}};
}

inline json scorer_params_to_json(const SyntheticScorerParams& p) {
  return {{"scale", p.scale}, {"noise_sigma", p.noise_sigma}, {"call_cost", p.call_cost}};
}

/// Trace document; record fields are frame, box, keyframe, score (null on
/// non-keyframes), cost, escalated. Wall-clock timings are left out so that
/// reruns are byte-identical.
inline json trace_to_json(const TrackTrace& t) {
  json records = json::array();
  for (const auto& r : t.records) {
    records.push_back({{"frame", r.frame},
                       {"box", box_to_json(r.box)},
                       {"keyframe", r.is_keyframe},
                       {"score", r.score ? json(*r.score) : json(nullptr)},
                       {"cost", r.cost},
                       {"escalated", r.escalated}});
  }
  return {{"config", tracker_config_to_json(t.config)},
          {"costs", costs_to_json(t.costs)},
          {"frames", t.records.size()},
          {"keyframe_count", t.keyframe_count},
          {"escalation_count", t.escalation_count},
          {"keyframe_ratio", t.keyframe_ratio()},
          {"total_cost", t.total_cost},
          {"records", records}};
}

/// Reads the records back; the config snapshot is not parsed.
inline TrackTrace trace_from_json(const json& j) {
  try {
    TrackTrace t;
    for (const auto& r : j.at("records")) {
      FrameRecord rec;
      rec.frame = r.at("frame").get<int>();
      rec.box = box_from_json(r.at("box"));
      rec.is_keyframe = r.at("keyframe").get<bool>();
      if (!r.at("score").is_null()) rec.score = r.at("score").get<double>();
      rec.cost = r.at("cost").get<double>();
      rec.escalated = r.at("escalated").get<bool>();
      if (rec.score.has_value() != rec.is_keyframe) throw FormatError("trace: score present iff keyframe");
      t.total_cost += rec.cost;
      t.keyframe_count += rec.is_keyframe ? 1 : 0;
      t.escalation_count += rec.escalated ? 1 : 0;
      t.records.push_back(rec);
    }
    return t;
  } catch (const json::exception& e) {
    throw FormatError(std::string("trace: ") + e.what());
  }
}

inline json metrics_to_json(const MetricsReport& m) {
  return {{"precision_curve", m.precision_curve},
          {"precision_at_20", m.precision_at_20},
          {"success_curve", m.success_curve},
          {"auc", m.auc},
          {"keyframe_ratio", m.keyframe_ratio},
          {"total_cost", m.total_cost},
          {"speedup_vs_baseline", m.speedup_vs_baseline ? json(*m.speedup_vs_baseline) : json(nullptr)}};
}

}  // namespace keyflow
