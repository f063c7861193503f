#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "keyflow/errors.hpp"
#include "keyflow/geometry.hpp"

namespace keyflow {

enum class BlendMode {
  kSizeOnly,  // adaptive ratio blends width/height, center follows the flow
  kFull,      // adaptive ratio blends center and size
};

inline std::string_view to_string(BlendMode m) {
  return m == BlendMode::kFull ? "full" : "size-only";
}

inline BlendMode parse_blend_mode(std::string_view s) {
  if (s == "size-only") return BlendMode::kSizeOnly;
  if (s == "full") return BlendMode::kFull;
  throw ConfigError("unknown blend_mode '" + std::string(s) + "' (expected size-only or full)");
}

struct PropagationParams {
  int m = 100;            // sample points per box
  double kr = 0.9;        // fraction of points kept after trimming
  double ar = 0.4;        // weight of the previous state in the blend
  double scale_min = 0.9; // per-frame scale clamp
  double scale_max = 1.1;
  BlendMode blend_mode = BlendMode::kSizeOnly;

  void validate() const {
    if (m < 4) throw ConfigError("propagation: m must be >= 4");
    if (!(kr > 0.0 && kr <= 1.0)) throw ConfigError("propagation: kr must lie in (0, 1]");
    if (!(ar >= 0.0 && ar <= 1.0)) throw ConfigError("propagation: ar must lie in [0, 1]");
    if (!(scale_min > 0.0 && scale_min <= 1.0 && scale_max >= 1.0 && std::isfinite(scale_max))) {
      throw ConfigError("propagation: scale clamp must satisfy 0 < min <= 1 <= max");
    }
  }
};

/// Deterministic g x g interior grid (g = ceil(sqrt(m))), row-major,
/// truncated to m points. Point (col, row) sits at fraction (col+1)/(g+1)
/// of the width and (row+1)/(g+1) of the height.
inline std::vector<Point> sample_points(const BoundingBox& b, int m) {
  if (m < 4) throw ConfigError("sample_points: m must be >= 4");
  int g = 1;
  while (g * g < m) ++g;
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(m));
  for (int row = 0; row < g && static_cast<int>(pts.size()) < m; ++row) {
    const double py = b.y + b.h * (row + 1) / (g + 1);
    for (int col = 0; col < g && static_cast<int>(pts.size()) < m; ++col) {
      pts.push_back({b.x + b.w * (col + 1) / (g + 1), py});
    }
  }
  return pts;
}

namespace detail {

inline double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace detail

/// Number of points trim_outliers keeps out of n.
inline std::size_t kept_count(std::size_t n, double kr) {
  // The epsilon absorbs products like 0.29 * 100 = 28.999999999999996.
  const auto k = static_cast<std::size_t>(std::floor(kr * static_cast<double>(n) + 1e-9));
  return std::max<std::size_t>(1, std::min(k, n));
}

/// Keeps the floor(kr*n) points (at least one) whose displacement is closest
/// to the componentwise median displacement. Ties go to the lower index;
/// the result is sorted ascending.
inline std::vector<std::size_t> trim_outliers(std::span<const Point> before,
                                              std::span<const Point> after, double kr) {
  if (before.size() != after.size()) {
    throw InternalError("trim_outliers: before/after length mismatch");
  }
  if (before.empty()) throw InternalError("trim_outliers: empty point set");
  if (!(kr > 0.0 && kr <= 1.0)) throw ConfigError("trim_outliers: kr must lie in (0, 1]");

  const std::size_t n = before.size();
  std::vector<double> dx(n), dy(n);
  for (std::size_t j = 0; j < n; ++j) {
    dx[j] = after[j].x - before[j].x;
    dy[j] = after[j].y - before[j].y;
  }
  const double mx = detail::median_of(dx);
  const double my = detail::median_of(dy);

  std::vector<double> dist(n);
  for (std::size_t j = 0; j < n; ++j) dist[j] = std::hypot(dx[j] - mx, dy[j] - my);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  order.resize(kept_count(n, kr));
  std::sort(order.begin(), order.end());
  return order;
}

/// Turns the kept correspondences into the next box: trimmed-mean
/// translation, RMS-spread scale ratio (clamped), then the adaptive-ratio
/// blend with the previous state. Does not clamp to the frame.
inline BoundingBox estimate_box(const BoundingBox& prev, std::span<const Point> before,
                                std::span<const Point> after, std::span<const std::size_t> kept,
                                const PropagationParams& params) {
  if (kept.empty()) throw PropagationError("estimate_box: no points survived trimming");
  if (before.size() != after.size()) throw InternalError("estimate_box: before/after length mismatch");

  const double n = static_cast<double>(kept.size());
  Point c_before, c_after;
  for (std::size_t j : kept) {
    if (j >= before.size()) throw InternalError("estimate_box: kept index out of range");
    c_before.x += before[j].x;
    c_before.y += before[j].y;
    c_after.x += after[j].x;
    c_after.y += after[j].y;
  }
  c_before = {c_before.x / n, c_before.y / n};
  c_after = {c_after.x / n, c_after.y / n};
  const Point t{c_after.x - c_before.x, c_after.y - c_before.y};

  double ss_before = 0.0, ss_after = 0.0;
  for (std::size_t j : kept) {
    ss_before += (before[j].x - c_before.x) * (before[j].x - c_before.x) +
                 (before[j].y - c_before.y) * (before[j].y - c_before.y);
    ss_after += (after[j].x - c_after.x) * (after[j].x - c_after.x) +
                (after[j].y - c_after.y) * (after[j].y - c_after.y);
  }
  const double spread_before = std::sqrt(ss_before / n);
  const double spread_after = std::sqrt(ss_after / n);
  double s = 1.0;
  if (spread_before >= 1e-9 && spread_after >= 1e-9) {
    s = std::clamp(spread_after / spread_before, params.scale_min, params.scale_max);
  }

  const Point prev_c = prev.center();
  const Point cand_c{prev_c.x + t.x, prev_c.y + t.y};
  const double ar = params.ar;
  const double w = ar * prev.w + (1.0 - ar) * (s * prev.w);
  const double h = ar * prev.h + (1.0 - ar) * (s * prev.h);
  Point c = cand_c;
  if (params.blend_mode == BlendMode::kFull) {
    c = {ar * prev_c.x + (1.0 - ar) * cand_c.x, ar * prev_c.y + (1.0 - ar) * cand_c.y};
  }
  const BoundingBox out = BoundingBox::from_center(c, w, h);
  if (!out.valid()) throw PropagationError("estimate_box: produced a non-finite or empty box");
  return out;
}

}  // namespace keyflow
