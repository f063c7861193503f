#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "keyflow/errors.hpp"
#include "keyflow/json_io.hpp"
#include "keyflow/observation.hpp"
#include "keyflow/sweep.hpp"
#include "keyflow/synth.hpp"
#include "keyflow/tracker.hpp"

namespace keyflow {

/// One experiment document: tracker, costs, scorer, sequence and sweep
/// settings plus the output directory and master seed.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  TrackerConfig tracker;
  CostModel costs;
  SyntheticScorerParams scorer{30.0, 1.0, 0.0};
  SequenceSpec sequence;
  SweepSettings sweep;

  /// Pushes the master seed into the tracker and sequence.
  void apply_seed(std::uint64_t s) {
    seed = s;
    tracker.seed = s;
    sequence.seed = s;
  }
};

namespace detail {

inline std::string pointer_escape(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

/// Maps JSON pointers (object keys and array elements) to 1-based source
/// lines. Only meaningful for text that nlohmann already accepted.
inline std::map<std::string, int> json_line_index(std::string_view text) {
  struct Ctx {
    bool object;
    std::string path;
    int index = 0;
    bool want_key = true;
    std::string last_key;
  };
  std::map<std::string, int> lines;
  std::vector<Ctx> stack;
  int line = 1;

  auto value_path = [&]() -> std::string {
    if (stack.empty()) return "";
    const Ctx& top = stack.back();
    if (top.object) return top.path + "/" + pointer_escape(top.last_key);
    std::string p = top.path + "/" + std::to_string(top.index);
    lines.emplace(p, line);
    return p;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == ':') {
      ++i;
    } else if (c == '"') {
      std::string s;
      ++i;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        s += text[i++];
      }
      ++i;
      if (!stack.empty() && stack.back().object && stack.back().want_key) {
        stack.back().last_key = s;
        stack.back().want_key = false;
        lines.emplace(stack.back().path + "/" + pointer_escape(s), line);
      } else {
        value_path();
      }
    } else if (c == ',') {
      if (!stack.empty()) {
        if (stack.back().object) stack.back().want_key = true;
        else ++stack.back().index;
      }
      ++i;
    } else if (c == '{' || c == '[') {
      std::string p = value_path();
      stack.push_back({c == '{', std::move(p), 0, true, {}});
      ++i;
    } else if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
      ++i;
    } else {
      value_path();
      while (i < text.size() && std::string_view(",]} \t\r\n").find(text[i]) == std::string_view::npos) ++i;
    }
  }
  return lines;
}

/// Strict view over one JSON object: every key must be consumed, and every
/// error names the source line.
class ConfigReader {
 public:
  ConfigReader(const json& j, std::string path, const std::map<std::string, int>& lines)
      : j_(j), path_(std::move(path)), lines_(lines) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(child(key), "wrong type");
    }
  }

  double threshold(const std::string& key, double fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    return convert(key, [&] { return threshold_from_json(j_.at(key)); });
  }

  template <typename F>
  auto convert(const std::string& key, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const Error& e) {
      fail(child(key), e.what());
    } catch (const json::exception&) {
      fail(child(key), "wrong type");
    }
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  ConfigReader object(const std::string& key) {
    seen_.insert(key);
    return ConfigReader(j_.at(key), child(key), lines_);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(child(it.key()), "unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& pointer, const std::string& msg) const {
    const auto it = lines_.find(pointer);
    const int line = it == lines_.end() ? 0 : it->second;
    throw ConfigError("config line " + std::to_string(line) + ": " + (pointer.empty() ? "/" : pointer) +
                      ": " + msg);
  }

  [[nodiscard]] std::string child(const std::string& key) const { return path_ + "/" + pointer_escape(key); }
  [[nodiscard]] const std::map<std::string, int>& lines() const { return lines_; }

  /// Runs a validation step, reporting failures at this object's line.
  template <typename F>
  void check(F&& f) const {
    try {
      f();
    } catch (const Error& e) {
      fail(path_, e.what());
    }
  }

 private:
  const json& j_;
  std::string path_;
  const std::map<std::string, int>& lines_;
  std::set<std::string> seen_;
};

inline Point read_point(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline void read_tracker(ConfigReader r, TrackerConfig& c) {
  c.k = r.get("k", c.k);
  c.t = r.threshold("t", c.t);
  c.q = r.get("q", c.q);
  c.m = r.get("m", c.m);
  c.kr = r.get("kr", c.kr);
  c.ar = r.get("ar", c.ar);
  if (r.has("blend_mode")) {
    const auto s = r.get<std::string>("blend_mode", "");
    c.blend_mode = r.convert("blend_mode", [&] { return parse_blend_mode(s); });
  }
  if (r.has("scale_clamp")) {
    const Point p = r.convert("scale_clamp", [&] { return read_point(r.raw("scale_clamp")); });
    c.scale_min = p.x;
    c.scale_max = p.y;
  }
  if (r.has("motion")) {
    ConfigReader m = r.object("motion");
    c.motion.translation_std = m.get("translation_std", c.motion.translation_std);
    c.motion.scale_std = m.get("scale_std", c.motion.scale_std);
    c.motion.scale_base = m.get("scale_base", c.motion.scale_base);
    m.finish();
  }
  r.finish();
  r.check([&] { c.validate(); });
}

inline void read_sequence(ConfigReader r, SequenceSpec& s) {
  s.width = r.get("width", s.width);
  s.height = r.get("height", s.height);
  s.frames = r.get("frames", s.frames);
  if (r.has("box")) s.initial_box = r.convert("box", [&] { return box_from_json(r.raw("box")); });
  s.flow_noise_sigma = r.get("flow_noise_sigma", s.flow_noise_sigma);
  if (r.has("trajectory")) {
    ConfigReader t = r.object("trajectory");
    Trajectory& tr = s.trajectory;
    if (t.has("kind")) {
      const auto kind = t.get<std::string>("kind", "");
      tr.kind = t.convert("kind", [&] { return parse_trajectory_kind(kind); });
    }
    if (t.has("velocity")) tr.velocity = t.convert("velocity", [&] { return read_point(t.raw("velocity")); });
    tr.amplitude = t.get("amplitude", tr.amplitude);
    tr.period = t.get("period", tr.period);
    tr.scale_rate = t.get("scale_rate", tr.scale_rate);
    if (t.has("segments")) {
      const json& segs = t.raw("segments");
      if (!segs.is_array()) t.fail(t.child("segments"), "expected an array");
      tr.segments.clear();
      for (std::size_t i = 0; i < segs.size(); ++i) {
        ConfigReader sr(segs[i], t.child("segments") + "/" + std::to_string(i), t.lines());
        TrajectorySegment seg;
        seg.frames = sr.get("frames", seg.frames);
        if (sr.has("velocity")) seg.velocity = sr.convert("velocity", [&] { return read_point(sr.raw("velocity")); });
        sr.finish();
        tr.segments.push_back(seg);
      }
    }
    t.finish();
  }
  if (r.has("windows")) {
    const json& ws = r.raw("windows");
    if (!ws.is_array()) r.fail(r.child("windows"), "expected an array");
    s.windows.clear();
    for (std::size_t i = 0; i < ws.size(); ++i) {
      ConfigReader wr(ws[i], r.child("windows") + "/" + std::to_string(i), r.lines());
      DifficultyWindow w;
      w.start = wr.get("start", w.start);
      w.end = wr.get("end", w.end);
      w.penalty = wr.get("penalty", w.penalty);
      w.flow_gain = wr.get("flow_gain", w.flow_gain);
      wr.finish();
      s.windows.push_back(w);
    }
  }
  r.finish();
  r.check([&] { s.validate(); });
}

}  // namespace detail

/// Parses an experiment document. Missing keys take their defaults; unknown
/// keys, wrong types and invalid values raise ConfigError with a line number.
inline ExperimentConfig parse_experiment_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw ConfigError("config line " + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  const auto lines = detail::json_line_index(text);
  detail::ConfigReader root(doc, "", lines);

  ExperimentConfig cfg;
  const auto seed = root.get<std::uint64_t>("seed", 0);
  cfg.output_dir = root.get<std::string>("output_dir", cfg.output_dir);
  if (root.has("tracker")) detail::read_tracker(root.object("tracker"), cfg.tracker);
  if (root.has("costs")) {
    auto c = root.object("costs");
    cfg.costs.cost_keyframe = c.get("keyframe", cfg.costs.cost_keyframe);
    cfg.costs.cost_nonkey = c.get("nonkey", cfg.costs.cost_nonkey);
    c.finish();
    c.check([&] { cfg.costs.validate(); });
  }
  if (root.has("scorer")) {
    auto s = root.object("scorer");
    cfg.scorer.scale = s.get("scale", cfg.scorer.scale);
    cfg.scorer.noise_sigma = s.get("noise_sigma", cfg.scorer.noise_sigma);
    cfg.scorer.call_cost = s.get("call_cost", cfg.scorer.call_cost);
    s.finish();
    s.check([&] { cfg.scorer.validate(); });
  }
  if (root.has("sequence")) detail::read_sequence(root.object("sequence"), cfg.sequence);
  if (root.has("sweep")) {
    auto s = root.object("sweep");
    if (s.has("t_values")) {
      const json& ts = s.raw("t_values");
      if (!ts.is_array()) s.fail(s.child("t_values"), "expected an array");
      cfg.sweep.t_values.clear();
      for (std::size_t i = 0; i < ts.size(); ++i) {
        try {
          cfg.sweep.t_values.push_back(threshold_from_json(ts[i]));
        } catch (const Error& e) {
          s.fail(s.child("t_values") + "/" + std::to_string(i), e.what());
        }
      }
    }
    cfg.sweep.sequences = s.get("sequences", cfg.sweep.sequences);
    cfg.sweep.randomize = s.get("randomize", cfg.sweep.randomize);
    cfg.sweep.jobs = s.get("jobs", cfg.sweep.jobs);
    s.finish();
    s.check([&] { cfg.sweep.validate(); });
  }
  root.finish();
  cfg.apply_seed(seed);
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_experiment_config(text);
}

inline json experiment_config_to_json(const ExperimentConfig& c) {
  json ts = json::array();
  for (double t : c.sweep.t_values) ts.push_back(threshold_to_json(t));
  json tracker = tracker_config_to_json(c.tracker);
  tracker.erase("seed");
  json seq = spec_to_json(c.sequence);
  seq.erase("seed");
  return {{"seed", c.seed},
          {"output_dir", c.output_dir},
          {"tracker", tracker},
          {"costs", costs_to_json(c.costs)},
          {"scorer", scorer_params_to_json(c.scorer)},
          {"sequence", seq},
          {"sweep",
           {{"t_values", ts},
            {"sequences", c.sweep.sequences},
            {"randomize", c.sweep.randomize},
            {"jobs", c.sweep.jobs}}}};
}

}  // namespace keyflow
