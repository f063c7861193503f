#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "keyflow/errors.hpp"
#include "keyflow/geometry.hpp"

namespace keyflow {

/// Gaussian candidate sampling around the previous state. Translation std is
/// translation_std * (w + h) / 2 per axis; sizes are multiplied by
/// scale_base^s with s ~ N(0, scale_std^2).
struct MotionParams {
  double translation_std = 0.3;
  double scale_std = 0.5;
  double scale_base = 1.05;

  void validate() const {
    if (!(translation_std >= 0.0) || !std::isfinite(translation_std)) {
      throw ConfigError("motion: translation_std must be finite and >= 0");
    }
    if (!(scale_std >= 0.0) || !std::isfinite(scale_std)) {
      throw ConfigError("motion: scale_std must be finite and >= 0");
    }
    if (!(scale_base > 0.0) || !std::isfinite(scale_base)) {
      throw ConfigError("motion: scale_base must be finite and > 0");
    }
  }

  friend bool operator==(const MotionParams&, const MotionParams&) = default;
};

struct CandidateSet {
  std::vector<BoundingBox> candidates;
  std::uint64_t rng_seed_used = 0;
};

/// Candidate 0 is `prev` itself; candidates 1..q-1 draw (dcx, dcy, s) in
/// that order from a mt19937_64 seeded with `seed`. All are clamped into
/// the frame.
inline CandidateSet generate_candidates(const BoundingBox& prev, int q, double frame_w,
                                        double frame_h, std::uint64_t seed,
                                        const MotionParams& params = {}) {
  if (q < 1) throw ConfigError("generate_candidates: q must be >= 1");
  if (!prev.valid()) throw ConfigError("generate_candidates: invalid previous box");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double r = 0.5 * (prev.w + prev.h);
  const double t_std = params.translation_std * r;
  const Point c = prev.center();

  CandidateSet out;
  out.rng_seed_used = seed;
  out.candidates.reserve(static_cast<std::size_t>(q));
  out.candidates.push_back(clamp_box(prev, frame_w, frame_h));
  for (int k = 1; k < q; ++k) {
    const double dcx = t_std * unit(rng);
    const double dcy = t_std * unit(rng);
    const double s = params.scale_std * unit(rng);
    const double f = std::pow(params.scale_base, s);
    const BoundingBox cand = BoundingBox::from_center({c.x + dcx, c.y + dcy}, prev.w * f, prev.h * f);
    out.candidates.push_back(clamp_box(cand, frame_w, frame_h));
  }
  return out;
}

}  // namespace keyflow
