#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "keyflow/errors.hpp"
#include "keyflow/geometry.hpp"

namespace keyflow {

struct FlowVector {
  float dx = 0.0f;
  float dy = 0.0f;

  friend bool operator==(const FlowVector&, const FlowVector&) = default;
};

/// Dense displacement field from one frame to the next, row-major.
/// Immutable once constructed.
class FlowField {
 public:
  FlowField() = default;

  FlowField(int width, int height, std::vector<FlowVector> vectors)
      : width_(width), height_(height), vectors_(std::move(vectors)) {
    if (width < 0 || height < 0) {
      throw ConfigError("FlowField: negative dimensions");
    }
    if (vectors_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw ConfigError("FlowField: vector count does not match width*height");
    }
    for (const auto& v : vectors_) {
      if (!std::isfinite(v.dx) || !std::isfinite(v.dy)) {
        throw ConfigError("FlowField: non-finite flow component");
      }
    }
  }

  static FlowField constant(int width, int height, FlowVector v) {
    return {width, height,
            std::vector<FlowVector>(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), v)};
  }

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] bool empty() const { return width_ == 0 || height_ == 0; }
  [[nodiscard]] std::span<const FlowVector> vectors() const { return vectors_; }

  [[nodiscard]] const FlowVector& at(int x, int y) const {
    return vectors_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                    static_cast<std::size_t>(x)];
  }

  friend bool operator==(const FlowField&, const FlowField&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<FlowVector> vectors_;
};

struct Displacement {
  double dx = 0.0;
  double dy = 0.0;
};

/// Bilinear interpolation of the field at a continuous position. Positions
/// outside the grid are clamped to the border first; grid positions return
/// the stored vector exactly.
inline Displacement bilinear_sample(const FlowField& f, Point p) {
  if (f.empty()) throw ConfigError("bilinear_sample: empty flow field");
  const double max_x = f.width() - 1;
  const double max_y = f.height() - 1;
  const double x = std::clamp(p.x, 0.0, max_x);
  const double y = std::clamp(p.y, 0.0, max_y);

  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, f.width() - 1);
  const int y1 = std::min(y0 + 1, f.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;

  const FlowVector& v00 = f.at(x0, y0);
  const FlowVector& v10 = f.at(x1, y0);
  const FlowVector& v01 = f.at(x0, y1);
  const FlowVector& v11 = f.at(x1, y1);

  const double w00 = (1.0 - fx) * (1.0 - fy);
  const double w10 = fx * (1.0 - fy);
  const double w01 = (1.0 - fx) * fy;
  const double w11 = fx * fy;
  return {w00 * v00.dx + w10 * v10.dx + w01 * v01.dx + w11 * v11.dx,
          w00 * v00.dy + w10 * v10.dy + w01 * v01.dy + w11 * v11.dy};
}

/// Moves every point by the bilinearly sampled flow at its position.
inline std::vector<Point> propagate_points(const FlowField& f, std::span<const Point> pts) {
  if (pts.empty()) throw PropagationError("propagate_points: empty point set");
  std::vector<Point> out;
  out.reserve(pts.size());
  for (const Point& p : pts) {
    const Displacement d = bilinear_sample(f, p);
    out.push_back({p.x + d.dx, p.y + d.dy});
  }
  return out;
}

/// Source of the flow between consecutive frames of one sequence. Frames are
/// 1-based; flow(i) maps frame i-1 to frame i, for 2 <= i <= frame_count().
template <typename P>
concept FlowProvider = requires(const P& p, int i) {
  { p.width() } -> std::convertible_to<int>;
  { p.height() } -> std::convertible_to<int>;
  { p.frame_count() } -> std::convertible_to<int>;
  { p.flow(i) } -> std::convertible_to<const FlowField&>;
};

}  // namespace keyflow
