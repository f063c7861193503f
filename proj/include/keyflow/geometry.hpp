#pragma once

#include <algorithm>
#include <cmath>

#include "keyflow/errors.hpp"

namespace keyflow {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned box in continuous pixel coordinates: (left, top, width, height).
/// The center is (x + w/2, y + h/2).
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double h = 1.0;

  [[nodiscard]] Point center() const { return {x + 0.5 * w, y + 0.5 * h}; }
  [[nodiscard]] double area() const { return w * h; }
  [[nodiscard]] double right() const { return x + w; }
  [[nodiscard]] double bottom() const { return y + h; }

  [[nodiscard]] bool valid() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
           std::isfinite(h) && w > 0.0 && h > 0.0;
  }

  static BoundingBox from_center(Point c, double w, double h) {
    return {c.x - 0.5 * w, c.y - 0.5 * h, w, h};
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

inline double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

/// Intersection over union, in [0, 1].
inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

/// Euclidean distance between box centers.
inline double center_error(const BoundingBox& a, const BoundingBox& b) {
  const Point ca = a.center();
  const Point cb = b.center();
  return std::hypot(ca.x - cb.x, ca.y - cb.y);
}

/// Moves `b` the least distance needed to fit inside [0,width]x[0,height],
/// shrinking any side that is longer than the frame.
inline BoundingBox clamp_box(const BoundingBox& b, double width, double height) {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw ConfigError("clamp_box: frame dimensions must be positive");
  }
  BoundingBox out = b;
  out.w = std::min(b.w, width);
  out.h = std::min(b.h, height);
  out.x = std::clamp(b.x, 0.0, width - out.w);
  out.y = std::clamp(b.y, 0.0, height - out.h);
  return out;
}

}  // namespace keyflow
