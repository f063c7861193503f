#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "keyflow/json_io.hpp"
#include "keyflow/sweep.hpp"

namespace keyflow {

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline std::string row_label(const SweepRow& row) {
  return row.t ? threshold_label(*row.t) : std::string("baseline");
}

inline std::string sweep_csv(const SweepResult& r) {
  std::string out = "t,kfr,auc,precision20,total_cost,speedup\n";
  for (const auto& row : r.rows) {
    out += row_label(row) + "," + detail::fmt("%.6f", row.keyframe_ratio) + "," + detail::fmt("%.6f", row.auc) +
           "," + detail::fmt("%.6f", row.precision20) + "," + detail::fmt("%.3f", row.total_cost) + "," +
           detail::fmt("%.6f", row.speedup) + "\n";
  }
  return out;
}

inline std::string sweep_summary(const SweepResult& r) {
  std::string out;
  out += "threshold sweep over " + std::to_string(r.sequences.size()) + " sequences\n";
  out += "  t            KFR(%)   AUC      P@20     cost        SU(%)\n";
  for (const auto& row : r.rows) {
    std::string name = row_label(row);
    if (row.is_fixed_interval()) name += " (fixed)";
    if (row.is_baseline()) name = "all-keyframe";
    char line[160];
    std::snprintf(line, sizeof line, "  %-12s %7.2f  %7.4f  %7.4f  %10.1f  %7.2f%s\n", name.c_str(),
                  100.0 * row.keyframe_ratio, row.auc, row.precision20, row.total_cost, row.speedup,
                  row.failed_runs ? "  (failed runs present)" : "");
    out += line;
  }
  return out;
}

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::optional<std::vector<std::string>> x_tick_labels;  // categorical axis at x = 0, 1, ...
  std::optional<std::pair<double, double>> y_range;
};

/// Self-contained SVG line chart with fixed number formatting.
inline std::string line_chart_svg(const ChartSpec& c) {
  using detail::fmt;
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 60;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (const auto& s : c.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (first) {
        x0 = x1 = s.x[i];
        y0 = y1 = s.y[i];
        first = false;
      }
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (c.y_range) std::tie(y0, y1) = *c.y_range;
  if (x1 - x0 < 1e-12) { x0 -= 0.5; x1 += 0.5; }
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  o += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  o += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
       detail::xml_escape(c.title) + "</text>\n";
  o += "<line x1=\"" + fmt("%.2f", L) + "\" y1=\"" + fmt("%.2f", H - B) + "\" x2=\"" + fmt("%.2f", W - R) +
       "\" y2=\"" + fmt("%.2f", H - B) + "\" stroke=\"black\"/>\n";
  o += "<line x1=\"" + fmt("%.2f", L) + "\" y1=\"" + fmt("%.2f", T) + "\" x2=\"" + fmt("%.2f", L) + "\" y2=\"" +
       fmt("%.2f", H - B) + "\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 5; ++k) {
    const double v = y0 + (y1 - y0) * k / 5.0;
    o += "<line x1=\"" + fmt("%.2f", L - 4) + "\" y1=\"" + fmt("%.2f", py(v)) + "\" x2=\"" + fmt("%.2f", L) +
         "\" y2=\"" + fmt("%.2f", py(v)) + "\" stroke=\"black\"/>";
    o += "<text x=\"" + fmt("%.2f", L - 8) + "\" y=\"" + fmt("%.2f", py(v) + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt("%.3g", v) + "</text>\n";
  }
  if (c.x_tick_labels) {
    for (std::size_t k = 0; k < c.x_tick_labels->size(); ++k) {
      const double x = px(static_cast<double>(k));
      o += "<text x=\"" + fmt("%.2f", x) + "\" y=\"" + fmt("%.2f", H - B + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::xml_escape((*c.x_tick_labels)[k]) + "</text>\n";
    }
  } else {
    for (int k = 0; k <= 5; ++k) {
      const double v = x0 + (x1 - x0) * k / 5.0;
      o += "<text x=\"" + fmt("%.2f", px(v)) + "\" y=\"" + fmt("%.2f", H - B + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + fmt("%.3g", v) + "</text>\n";
    }
  }
  o += "<text x=\"320\" y=\"" + fmt("%.2f", H - 18) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + detail::xml_escape(c.x_label) +
       "</text>\n";
  o += "<text x=\"18\" y=\"" + fmt("%.2f", (T + H - B) / 2) + "\" transform=\"rotate(-90 18 " +
       fmt("%.2f", (T + H - B) / 2) + ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
       detail::xml_escape(c.y_label) + "</text>\n";

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};
  for (std::size_t si = 0; si < c.series.size(); ++si) {
    const Series& s = c.series[si];
    const std::string color = colors[si % 5];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!pts.empty()) pts += " ";
      pts += fmt("%.2f", px(s.x[i])) + "," + fmt("%.2f", py(s.y[i]));
    }
    o += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"" +
         (s.dashed ? std::string(" stroke-dasharray=\"6 4\"") : std::string()) + " points=\"" + pts + "\"/>\n";
    if (!s.dashed) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        o += "<circle cx=\"" + fmt("%.2f", px(s.x[i])) + "\" cy=\"" + fmt("%.2f", py(s.y[i])) + "\" r=\"3\" fill=\"" +
             color + "\"/>\n";
      }
    }
    const double ly = T + 6 + 16.0 * static_cast<double>(si);
    o += "<line x1=\"" + fmt("%.2f", W - R - 150) + "\" y1=\"" + fmt("%.2f", ly) + "\" x2=\"" +
         fmt("%.2f", W - R - 130) + "\" y2=\"" + fmt("%.2f", ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>";
    o += "<text x=\"" + fmt("%.2f", W - R - 125) + "\" y=\"" + fmt("%.2f", ly + 4) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::xml_escape(s.name) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

/// Keyframe ratio against threshold (categorical t axis).
inline std::string keyframe_ratio_svg(const SweepResult& r) {
  const auto rows = r.threshold_rows();
  ChartSpec c{"Keyframe ratio vs. score threshold", "score threshold t", "keyframe ratio (%)", {}, std::vector<std::string>{}, std::pair{0.0, 100.0}};
  Series s{"keyframe ratio", {}, {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s.x.push_back(static_cast<double>(i));
    s.y.push_back(100.0 * rows[i].keyframe_ratio);
    c.x_tick_labels->push_back(row_label(rows[i]));
  }
  c.series.push_back(std::move(s));
  return line_chart_svg(c);
}

/// Success AUC against threshold, with the all-keyframe baseline dashed.
inline std::string auc_svg(const SweepResult& r) {
  const auto rows = r.threshold_rows();
  ChartSpec c{"Overlap success (AUC) vs. score threshold", "score threshold t", "success AUC", {}, std::vector<std::string>{}, std::nullopt};
  Series s{"adaptive", {}, {}};
  Series b{"all-keyframe baseline", {}, {}, true};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s.x.push_back(static_cast<double>(i));
    s.y.push_back(rows[i].auc);
    c.x_tick_labels->push_back(row_label(rows[i]));
  }
  if (!rows.empty()) {
    b.x = {0.0, static_cast<double>(rows.size() - 1)};
    b.y = {r.baseline().auc, r.baseline().auc};
  }
  c.series.push_back(std::move(s));
  c.series.push_back(std::move(b));
  return line_chart_svg(c);
}

inline std::string precision_svg(const MetricsReport& m) {
  ChartSpec c{"Precision plot", "center error threshold (px)", "precision", {}, std::nullopt, std::pair{0.0, 1.0}};
  Series s{"P@20 " + detail::fmt("%.3f", m.precision_at_20), {}, {}};
  for (std::size_t i = 0; i < m.precision_curve.size(); ++i) {
    s.x.push_back(static_cast<double>(i));
    s.y.push_back(m.precision_curve[i]);
  }
  c.series.push_back(std::move(s));
  return line_chart_svg(c);
}

inline std::string success_svg(const MetricsReport& m) {
  ChartSpec c{"Success plot", "overlap threshold", "success rate", {}, std::nullopt, std::pair{0.0, 1.0}};
  Series s{"AUC " + detail::fmt("%.3f", m.auc), {}, {}};
  for (std::size_t i = 0; i < m.success_curve.size(); ++i) {
    s.x.push_back(static_cast<double>(i) / kSuccessSteps);
    s.y.push_back(m.success_curve[i]);
  }
  c.series.push_back(std::move(s));
  return line_chart_svg(c);
}

inline json sweep_to_json(const SweepResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"t", row.t ? threshold_to_json(*row.t) : json("baseline")},
                    {"kfr", row.keyframe_ratio},
                    {"auc", row.auc},
                    {"precision20", row.precision20},
                    {"total_cost", row.total_cost},
                    {"speedup", row.speedup},
                    {"runs", row.runs},
                    {"failed_runs", row.failed_runs}});
  }
  json runs = json::array();
  for (const auto& run : r.runs) {
    runs.push_back({{"sequence", run.sequence},
                    {"t", run.t ? threshold_to_json(*run.t) : json("baseline")},
                    {"kfr", run.keyframe_ratio},
                    {"auc", run.auc},
                    {"precision20", run.precision20},
                    {"total_cost", run.total_cost},
                    {"escalations", run.escalations},
                    {"updates_on_keyframes_only", run.updates_on_keyframes_only},
                    {"error", run.error ? json(*run.error) : json(nullptr)}});
  }
  return {{"rows", rows}, {"runs", runs}};
}

}  // namespace keyflow
